#include "srrc/rrc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srrc/errors.hpp"
#include "srrc/random.hpp"

namespace srrc {

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

void input_scale(const TimeSeries& x, double& range, double& scale) {
    range = 0.0;
    scale = 0.0;
    for (Index j = 0; j < x.variables(); ++j) {
        const auto col = x.values.col(j);
        range = std::max(range, col.maxCoeff() - col.minCoeff());
        scale = std::max(scale, col.cwiseAbs().maxCoeff());
    }
}

// Shared core: solve W_hat (R H0) = H1 and fill in the model fields derived from it.
RRCModel fit(const TimeSeries& x, const Matrix& h1, const EmbeddingConfig& cfg,
             const SolverConfig& solver, std::uint64_t seed, const TrainOptions& opts,
             int n_out, int target_lag) {
    solver.validate();
    RRCModel model;
    model.n = static_cast<int>(x.variables());
    model.lag = cfg.lag;
    model.order = cfg.order;
    model.n_out = n_out;
    model.target_lag = target_lag;
    model.selector_offset = opts.selector_offset == 0 ? target_lag : opts.selector_offset;
    if (model.selector_offset < 1 || model.selector_offset > target_lag) {
        throw InvalidArgument("selector offset must lie in [1, " + std::to_string(target_lag) + "]");
    }

    const double eps = opts.grouping_eps > 0.0 ? opts.grouping_eps
                                               : default_grouping_eps(opts.nu, cfg.order);
    model.R = compression_matrix(model.n, cfg.lag, cfg.order, opts.nu, eps, seed, cfg.feature_budget);

    const Matrix h0 = feature_matrix(x, cfg);
    if (h0.cols() != h1.cols()) throw DimensionMismatch("feature and target column counts differ");
    const Matrix reduced = compress_columns(model.R, h0);

    const SparseSolution sol = sparse_lstsq(reduced.transpose(), h1.transpose(), solver);
    model.W_hat = sol.X.transpose();

    auto& diag = model.diagnostics;
    diag.residual_norm = (model.W_hat * reduced - h1).norm();
    diag.target_norm = h1.norm();
    diag.nnz = static_cast<Index>((model.W_hat.array() != 0.0).count());
    diag.rank = sol.rank;
    diag.samples = h0.cols();
    diag.residual_bounds = sol.residual_bounds;
    diag.converged = std::all_of(sol.converged.begin(), sol.converged.end(), [](bool c) { return c; });
    diag.seed = seed;
    diag.rng = std::string(Rng::kName);
    input_scale(x, diag.data_range, diag.data_scale);
    return model;
}

}  // namespace

bool TrainingDiagnostics::operator==(const TrainingDiagnostics& o) const {
    return residual_norm == o.residual_norm && target_norm == o.target_norm && nnz == o.nnz &&
           rank == o.rank && samples == o.samples && same_matrix(residual_bounds, o.residual_bounds) &&
           data_range == o.data_range && data_scale == o.data_scale && converged == o.converged &&
           seed == o.seed && rng == o.rng;
}

bool RRCModel::operator==(const RRCModel& o) const {
    return n == o.n && lag == o.lag && order == o.order && n_out == o.n_out &&
           target_lag == o.target_lag && selector_offset == o.selector_offset && R == o.R &&
           same_matrix(W_hat, o.W_hat) && diagnostics == o.diagnostics;
}

void RRCModel::validate() const {
    if (n < 1 || lag < 1 || order < 1 || n_out < 1 || target_lag < 1) {
        throw SchemaError("model dimensions must be positive");
    }
    if (selector_offset < 1 || selector_offset > target_lag) {
        throw SchemaError("selector offset outside [1, target_lag]");
    }
    if (R.n != n || R.lag != lag || R.order != order) {
        throw SchemaError("compression matrix parameters do not match the model");
    }
    try {
        R.validate();
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
    if (static_cast<std::uint64_t>(R.cols) !=
        feature_dimension(static_cast<std::uint64_t>(window_size()), order)) {
        throw SchemaError("compression matrix width does not match d_p(nL)");
    }
    if (W_hat.rows() != output_size() || W_hat.cols() != R.rows()) {
        throw SchemaError("output coupling matrix has the wrong shape");
    }
}

Matrix selector_matrix(int n_out, int target_lag, int selector_offset) {
    if (n_out < 1 || target_lag < 1) throw InvalidArgument("selector dimensions must be positive");
    if (selector_offset < 1 || selector_offset > target_lag) {
        throw InvalidArgument("selector offset must lie in [1, L]");
    }
    Matrix k = Matrix::Zero(n_out, static_cast<Index>(n_out) * target_lag);
    for (Index j = 0; j < n_out; ++j) k(j, j * target_lag + selector_offset - 1) = 1.0;
    return k;
}

RRCModel train_rrc(const TimeSeries& x, const TimeSeries& y, const EmbeddingConfig& cfg,
                   const SolverConfig& solver, std::uint64_t seed, const TrainOptions& opts) {
    cfg.validate();
    if (x.samples() != y.samples()) {
        throw DimensionMismatch("input and target series have different lengths");
    }
    if (x.variables() != y.variables()) {
        throw DimensionMismatch("input and target series have different variable counts");
    }
    if (x.samples() <= cfg.lag) {
        throw InvalidArgument("training needs more than L = " + std::to_string(cfg.lag) + " samples");
    }
    const DataMatrices data = build_data_matrices(x, y, cfg);
    return fit(x, data.H1, cfg, solver, seed, opts, static_cast<int>(y.variables()), cfg.lag);
}

RRCModel train_autoregressive(const TimeSeries& x, const EmbeddingConfig& cfg,
                              const SolverConfig& solver, std::uint64_t seed,
                              const TrainOptions& opts) {
    cfg.validate();
    x.validate();
    if (x.samples() < cfg.lag + 1) {
        throw InvalidArgument("autoregressive training needs at least L + 1 samples");
    }
    const Index pairs = x.samples() - 1;
    return train_rrc(x.slice(0, pairs), x.slice(1, pairs), cfg, solver, seed, opts);
}

RRCModel train_readout(const TimeSeries& x, const Matrix& targets, const EmbeddingConfig& cfg,
                       const SolverConfig& solver, std::uint64_t seed, const TrainOptions& opts) {
    cfg.validate();
    x.validate();
    if (targets.rows() != x.samples() - cfg.lag + 1) {
        throw DimensionMismatch("readout targets need one row per embedded sample (" +
                                std::to_string(x.samples() - cfg.lag + 1) + "), got " +
                                std::to_string(targets.rows()));
    }
    if (targets.cols() < 1 || !targets.allFinite()) {
        throw InvalidArgument("readout targets must be finite with at least one channel");
    }
    TrainOptions readout_opts = opts;
    readout_opts.selector_offset = 1;
    return fit(x, targets.transpose(), cfg, solver, seed, readout_opts,
               static_cast<int>(targets.cols()), 1);
}

Vector reduced_features(const RRCModel& model, const Vector& window) {
    if (window.size() != model.window_size()) {
        throw DimensionMismatch("window has " + std::to_string(window.size()) + " entries, model expects " +
                                std::to_string(model.window_size()));
    }
    return compress(model.R, eth_map(window, model.order));
}

Transformed transform(const RRCModel& model, const Vector& window) {
    Transformed out;
    out.dilated = model.W_hat * reduced_features(model, window);
    out.selected.resize(model.n_out);
    for (Index j = 0; j < model.n_out; ++j) {
        out.selected[j] = out.dilated[j * model.target_lag + model.selector_offset - 1];
    }
    return out;
}

Vector advance_window(const Vector& window, int lag, const Vector& next) {
    if (lag < 1 || window.size() != next.size() * lag) {
        throw DimensionMismatch("advance_window: window is not n blocks of length L");
    }
    Vector out(window.size());
    for (Index j = 0; j < next.size(); ++j) {
        out.segment(j * lag, lag - 1) = window.segment(j * lag + 1, lag - 1);
        out[j * lag + lag - 1] = next[j];
    }
    return out;
}

TimeSeries forecast(const RRCModel& model, const Vector& seed_window, Index horizon,
                    const ForecastOptions& opts) {
    if (horizon < 1) throw InvalidArgument("forecast horizon must be at least 1");
    if (model.n_out != model.n || model.target_lag != model.lag) {
        throw DimensionMismatch("model output does not feed back into its input window");
    }
    if (seed_window.size() != model.window_size()) {
        throw DimensionMismatch("seed window has " + std::to_string(seed_window.size()) +
                                " entries, model expects " + std::to_string(model.window_size()));
    }
    const auto& diag = model.diagnostics;
    const double scale = diag.data_range > 0.0 ? diag.data_range : std::max(diag.data_scale, 1.0);
    const double guard = opts.guard_factor * scale;

    Matrix out(horizon, model.n);
    Vector window = seed_window;
    for (Index step = 0; step < horizon; ++step) {
        const Vector next = transform(model, window).selected;
        for (Index j = 0; j < next.size(); ++j) {
            if (!std::isfinite(next[j]) || std::abs(next[j]) > guard) {
                throw NumericBlowup(static_cast<std::size_t>(step + 1), next[j]);
            }
        }
        out.row(step) = next.transpose();
        window = advance_window(window, model.lag, next);
    }
    return TimeSeries(std::move(out));
}

}  // namespace srrc
