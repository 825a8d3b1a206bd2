#include "srrc/remittance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srrc/errors.hpp"
#include "srrc/random.hpp"

namespace srrc {

namespace {

constexpr double kPi = 3.14159265358979323846;

TimeSeries remittance_series(const RemittancePanel& panel, Index rows) {
    return TimeSeries(panel.remittances.topRows(rows));
}

RemittanceFit fit_kind(const RemittancePanel& panel, const SolverConfig& solver,
                       double train_fraction, ModelKind kind) {
    panel.validate();
    if (!(train_fraction > 0.0) || train_fraction > 1.0) {
        throw InvalidArgument("train fraction must lie in (0, 1]");
    }
    const int lag = kind == ModelKind::Lagged ? 2 : 1;
    const Index min_quarters = kind == ModelKind::Lagged ? 3 : 2;
    if (panel.quarters() < min_quarters) {
        throw InvalidArgument(std::string(to_string(kind)) + " model needs at least " +
                              std::to_string(min_quarters) + " quarters, panel has " +
                              std::to_string(panel.quarters()));
    }
    RemittanceFit fit;
    fit.kind = kind;
    fit.train_fraction = train_fraction;
    fit.train_rows = leading_rows(train_fraction, panel.quarters());
    if (fit.train_rows < lag) {
        throw InvalidArgument("training block of " + std::to_string(fit.train_rows) +
                              " quarters is too short for the " + to_string(kind) + " model");
    }
    const EmbeddingConfig cfg{lag, 1};
    const Matrix targets = panel.deposits.middleRows(lag - 1, fit.train_rows - lag + 1);
    fit.model = train_readout(remittance_series(panel, fit.train_rows), targets, cfg, solver, 0);
    return fit;
}

}  // namespace

void RemittancePanel::validate() const {
    if (remittances.rows() < 1 || remittances.cols() < 1 || deposits.cols() < 1) {
        throw InvalidArgument("panel needs at least one quarter, region and institution");
    }
    if (remittances.rows() != deposits.rows()) {
        throw DimensionMismatch("remittance and deposit panels have different quarter counts (" +
                                std::to_string(remittances.rows()) + " vs " +
                                std::to_string(deposits.rows()) + ")");
    }
    if (!remittances.allFinite() || !deposits.allFinite()) {
        throw InvalidArgument("panel contains non-finite values");
    }
    if (!period_labels.empty() && static_cast<Index>(period_labels.size()) != remittances.rows()) {
        throw DimensionMismatch("period label count does not match quarter count");
    }
}

const char* to_string(ModelKind kind) {
    return kind == ModelKind::Lagged ? "lagged" : "non-lagged";
}

Index leading_rows(double fraction, Index total) {
    const double raw = fraction * static_cast<double>(total);
    const auto rows = static_cast<Index>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::clamp<Index>(rows, 0, total);
}

RemittanceFit fit_nonlagged(const RemittancePanel& panel, const SolverConfig& solver,
                            double train_fraction) {
    return fit_kind(panel, solver, train_fraction, ModelKind::NonLagged);
}

RemittanceFit fit_lagged(const RemittancePanel& panel, const SolverConfig& solver,
                         double train_fraction) {
    return fit_kind(panel, solver, train_fraction, ModelKind::Lagged);
}

Index first_predictable_row(ModelKind kind) { return kind == ModelKind::Lagged ? 1 : 0; }

Matrix predict_deposits(const RemittanceFit& fit, const RemittancePanel& panel) {
    panel.validate();
    if (panel.regions() != fit.model.n) throw DimensionMismatch("panel region count does not match the model");
    const TimeSeries r(panel.remittances);
    const Index first = first_predictable_row(fit.kind);
    Matrix out(panel.quarters() - first, fit.model.n_out);
    for (Index row = first; row < panel.quarters(); ++row) {
        out.row(row - first) = transform(fit.model, delay_embed(r, fit.model.lag, row + 1)).selected.transpose();
    }
    return out;
}

Vector exposure(const Matrix& observed, const Matrix& fitted) {
    if (observed.rows() != fitted.rows() || observed.cols() != fitted.cols()) {
        throw DimensionMismatch("observed and fitted matrices differ in shape");
    }
    if (observed.rows() < 1) throw InvalidArgument("exposure needs at least one evaluated step");
    Vector out(observed.cols());
    const double root_steps = std::sqrt(static_cast<double>(observed.rows()));
    for (Index j = 0; j < observed.cols(); ++j) {
        const double peak = observed.col(j).cwiseAbs().maxCoeff();
        if (peak == 0.0) throw DegenerateChannel(static_cast<std::size_t>(j));
        out[j] = (fitted.col(j) - observed.col(j)).norm() / (root_steps * peak);
    }
    return out;
}

ExposureReport exposure_report(const RemittancePanel& panel, ModelKind kind,
                               const ExposureOptions& opts, RemittanceFit* fit_out) {
    const RemittanceFit fit = kind == ModelKind::Lagged
                                  ? fit_lagged(panel, opts.solver, opts.train_fraction)
                                  : fit_nonlagged(panel, opts.solver, opts.train_fraction);
    const Matrix predicted = predict_deposits(fit, panel);
    const Index first_predicted = first_predictable_row(kind);
    const Index first = opts.held_out_only ? std::max(first_predicted, fit.train_rows) : first_predicted;
    const Index rows = panel.quarters() - first;
    if (rows < 1) throw InvalidArgument("no held-out quarters to evaluate");

    ExposureReport report;
    report.kind = kind;
    report.train_fraction = opts.train_fraction;
    report.first_row = first;
    report.fitted = predicted.bottomRows(rows);
    report.observed = panel.deposits.bottomRows(rows);
    report.exposures = exposure(report.observed, report.fitted);
    if (fit_out) *fit_out = fit;
    return report;
}

std::vector<RankedExposure> rank_exposures(const Vector& exposures, Index k) {
    if (k < 1 || k > exposures.size()) {
        throw InvalidArgument("k must lie in [1, " + std::to_string(exposures.size()) + "]");
    }
    std::vector<Index> order(static_cast<std::size_t>(exposures.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&exposures](Index a, Index b) { return exposures[a] > exposures[b]; });
    std::vector<RankedExposure> out;
    out.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) {
        const Index j = order[static_cast<std::size_t>(i)];
        out.push_back({j + 1, exposures[j]});
    }
    return out;
}

std::vector<CouplingEdge> coupling_edges(const RemittanceFit& fit) {
    const RRCModel& m = fit.model;
    const Index window = m.window_size();
    std::vector<CouplingEdge> edges;
    for (Index i = 0; i < m.W_hat.rows(); ++i) {
        for (Index c = 0; c < m.W_hat.cols(); ++c) {
            const double w = m.W_hat(i, c);
            if (w == 0.0) continue;
            // p = 1: every compression row is a single feature index.
            const Index feature = m.R.groups[static_cast<std::size_t>(c)].front();
            CouplingEdge e{i + 1, 0, 0, w};
            if (feature < window) {
                e.region = feature / m.lag + 1;
                e.lag = static_cast<int>(m.lag - 1 - feature % m.lag);
            }
            edges.push_back(e);
        }
    }
    return edges;
}

PlantedPanel synth_panel(Index regions, Index institutions, Index quarters, std::uint64_t seed,
                         double noise_level, bool lagged) {
    if (regions < 1 || institutions < 1 || quarters < 1) {
        throw InvalidArgument("panel counts must be at least 1");
    }
    if (!(noise_level >= 0.0)) throw InvalidArgument("noise level must be non-negative");
    Rng rng(seed);

    // One extra leading quarter supplies r(t-1) for the first row.
    const Index steps = quarters + 1;
    Matrix r(steps, regions);
    for (Index k = 0; k < regions; ++k) {
        const double level = 5.0 + 10.0 * rng.uniform();
        const double drift = 0.05 + 0.25 * rng.uniform();
        const double amp_sin = 2.0 * rng.uniform() - 1.0;
        const double amp_cos = 2.0 * rng.uniform() - 1.0;
        for (Index s = 0; s < steps; ++s) {
            const double t = static_cast<double>(s);
            r(s, k) = level + drift * t + amp_sin * std::sin(kPi * t / 2.0) +
                      amp_cos * std::cos(kPi * t / 2.0) + noise_level * level * rng.normal();
        }
    }

    auto sparse_weights = [&](double density) {
        Matrix m = Matrix::Zero(institutions, regions);
        for (Index i = 0; i < institutions; ++i) {
            for (Index k = 0; k < regions; ++k) {
                if (rng.uniform() < density) m(i, k) = 0.2 + 0.8 * rng.uniform();
            }
        }
        return m;
    };
    // Every institution must depend on at least one region.
    auto ensure_connected = [&](Matrix& m) {
        for (Index i = 0; i < institutions; ++i) {
            if ((m.row(i).array() != 0.0).any()) continue;
            const auto k = static_cast<Index>(rng.uniform() * static_cast<double>(regions));
            m(i, std::min(k, regions - 1)) = 0.2 + 0.8 * rng.uniform();
        }
    };

    PlantedPanel out;
    out.M0 = sparse_weights(0.3);
    ensure_connected(out.M0);
    out.M1 = lagged ? sparse_weights(0.3) : Matrix::Zero(institutions, regions);
    out.bias = Vector::Zero(institutions);
    for (Index i = 0; i < institutions; ++i) out.bias[i] = 1.0 + 4.0 * rng.uniform();

    Matrix d(quarters, institutions);
    for (Index q = 0; q < quarters; ++q) {
        d.row(q) = (out.M0 * r.row(q + 1).transpose() + out.M1 * r.row(q).transpose() + out.bias).transpose();
    }
    if (noise_level > 0.0) {
        for (Index i = 0; i < institutions; ++i) {
            const double level = d.col(i).cwiseAbs().mean();
            for (Index q = 0; q < quarters; ++q) d(q, i) += noise_level * level * rng.normal();
        }
    }

    out.panel.remittances = r.bottomRows(quarters);
    out.panel.deposits = d;
    out.panel.period_labels.reserve(static_cast<std::size_t>(quarters));
    for (Index q = 0; q < quarters; ++q) out.panel.period_labels.push_back(std::to_string(q));
    return out;
}

}  // namespace srrc
