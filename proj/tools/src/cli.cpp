#include "srrc_cli/cli.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "srrc/srrc.hpp"

namespace srrc::cli {

namespace {

// Thrown for input that is well-formed but unusable (too few rows and similar).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string label_of(const TimeSeries& s, Index j) {
    return s.labels.empty() ? "x" + std::to_string(j + 1) : s.labels[static_cast<std::size_t>(j)];
}

void kv(std::ostream& out, const std::string& key, const std::string& value) {
    out << key << '=' << value << '\n';
}
void kv(std::ostream& out, const std::string& key, double value) { kv(out, key, format_real(value)); }
void kv(std::ostream& out, const std::string& key, Index value) { kv(out, key, std::to_string(value)); }

struct SimulateArgs {
    std::string regime;
    std::vector<double> params;
    std::vector<double> ic;
    Index samples = 12000;
    double t_end = 120.0;
    double rtol = 1e-9;
    double atol = 1e-11;
    std::string out;
};

struct TrainArgs {
    std::string input;
    std::string target;
    int lag = 0;
    int order = 2;
    double delta = 1e-6;
    double epsilon = 1e-8;
    int max_iter = 50;
    double train_frac = 1.0;
    std::uint64_t seed = 0;
    double nu = 1.0;
    int selector_offset = 0;
    std::string out;
};

struct ForecastArgs {
    std::string model;
    std::string seed_data;
    Index seed_end = 0;
    Index horizon = 0;
    std::string truth;
    Index truth_start = 1;
    double guard = 1e6;
    std::string out;
};

struct ExposureArgs {
    std::string remittances;
    std::string deposits;
    bool lagged = false;
    double train_frac = 0.95;
    double delta = 1e-8;
    double epsilon = 1e-10;
    int max_iter = 50;
    bool held_out_only = false;
    std::string out;
    std::string adjacency;
    std::string fitted;
};

struct SuggestLagArgs {
    std::string input;
};

struct SynthPanelArgs {
    Index regions = 18;
    Index institutions = 15;
    Index quarters = 24;
    std::uint64_t seed = 0;
    double noise = 0.0;
    bool non_lagged = false;
    std::string remittances;
    std::string deposits;
    std::string planted;
};

void check_fraction(double frac) {
    if (!(frac > 0.0) || frac > 1.0) throw UsageError("--train-frac must lie in (0, 1]");
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    FinancialParams params;
    if (a.regime == "chaotic") {
        params = FinancialParams::chaotic();
    } else if (a.regime == "periodic") {
        params = FinancialParams::periodic();
    } else if (a.params.empty() || a.ic.empty()) {
        throw UsageError("give --regime, or both --params and --ic");
    }
    if (!a.params.empty()) {
        if (a.params.size() != 3) throw UsageError("--params expects s,c,e");
        params.s = a.params[0];
        params.c = a.params[1];
        params.e = a.params[2];
    }
    if (!a.ic.empty()) {
        if (a.ic.size() != 3) throw UsageError("--ic expects x0,y0,z0");
        params.x0 = a.ic[0];
        params.y0 = a.ic[1];
        params.z0 = a.ic[2];
    }
    const SimulationGrid grid{a.t_end, a.samples, a.rtol, a.atol};
    try {
        grid.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const TimeSeries orbit = integrate(params, grid);
    write_series(a.out, orbit);
    kv(out, "samples", orbit.samples());
    kv(out, "t_end", a.t_end);
    kv(out, "s", params.s);
    kv(out, "c", params.c);
    kv(out, "e", params.e);
    kv(out, "out", a.out);
    return kExitOk;
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
    if (a.lag < 1) throw UsageError("--lag must be at least 1");
    if (a.order < 1) throw UsageError("--order must be at least 1");
    if (!(a.delta > 0.0)) throw UsageError("--delta must be positive");
    if (!(a.epsilon >= 0.0)) throw UsageError("--epsilon must be non-negative");
    if (a.max_iter < 1) throw UsageError("--max-iter must be at least 1");
    if (!(a.nu > 0.0)) throw UsageError("--nu must be positive");
    if (a.selector_offset < 0 || a.selector_offset > a.lag) {
        throw UsageError("--selector-offset must lie in [0, lag]");
    }
    check_fraction(a.train_frac);

    const TimeSeries input = read_series(a.input);
    const Index rows = leading_rows(a.train_frac, input.samples());
    const EmbeddingConfig cfg{a.lag, a.order};
    const SolverConfig solver{a.delta, a.max_iter, a.epsilon};
    TrainOptions opts;
    opts.nu = a.nu;
    opts.selector_offset = a.selector_offset;

    RRCModel model;
    if (a.target.empty()) {
        if (rows < a.lag + 1) {
            throw UsageError("training block has " + std::to_string(rows) + " rows; lag " +
                             std::to_string(a.lag) + " needs at least " + std::to_string(a.lag + 1));
        }
        model = train_autoregressive(input.slice(0, rows), cfg, solver, a.seed, opts);
    } else {
        const TimeSeries target = read_series(a.target);
        if (target.samples() != input.samples()) {
            throw UsageError("--target has " + std::to_string(target.samples()) + " rows, --input has " +
                             std::to_string(input.samples()));
        }
        if (rows < a.lag + 1) {
            throw UsageError("training block has " + std::to_string(rows) + " rows; lag " +
                             std::to_string(a.lag) + " needs at least " + std::to_string(a.lag + 1));
        }
        model = train_rrc(input.slice(0, rows), target.slice(0, rows), cfg, solver, a.seed, opts);
    }
    save_model(model, a.out);

    const auto& d = model.diagnostics;
    kv(out, "train_rows", rows);
    kv(out, "samples", d.samples);
    kv(out, "d", model.R.cols);
    kv(out, "rho", model.R.rows());
    kv(out, "rank", d.rank);
    kv(out, "nnz", d.nnz);
    kv(out, "residual", d.residual_norm);
    kv(out, "relative_residual", d.target_norm > 0.0 ? d.residual_norm / d.target_norm : 0.0);
    kv(out, "converged", d.converged ? "true" : "false");
    kv(out, "seed", std::to_string(d.seed));
    kv(out, "rng", d.rng);
    kv(out, "out", a.out);
    return kExitOk;
}

int cmd_forecast(const ForecastArgs& a, std::ostream& out) {
    if (a.horizon < 1) throw UsageError("--horizon must be at least 1");
    if (!(a.guard > 0.0)) throw UsageError("--guard must be positive");
    const RRCModel model = load_model(a.model);
    const TimeSeries seed = read_series(a.seed_data);
    const Index end = a.seed_end == 0 ? seed.samples() : a.seed_end;
    if (end < model.lag || end > seed.samples()) {
        throw UsageError("seed window must end at a row in [" + std::to_string(model.lag) + ", " +
                         std::to_string(seed.samples()) + "]");
    }
    if (seed.variables() != model.n) {
        throw UsageError("--seed-data has " + std::to_string(seed.variables()) + " variables, model expects " +
                         std::to_string(model.n));
    }
    std::optional<TimeSeries> truth;
    if (!a.truth.empty()) {
        truth = read_series(a.truth);
        if (truth->variables() != model.n) throw UsageError("--truth variable count does not match the model");
        if (a.truth_start < 1 || a.truth_start - 1 + a.horizon > truth->samples()) {
            throw UsageError("--truth needs " + std::to_string(a.horizon) + " rows from row " +
                             std::to_string(a.truth_start));
        }
    }

    ForecastOptions fopts;
    fopts.guard_factor = a.guard;
    TimeSeries pred = forecast(model, delay_embed(seed, model.lag, end), a.horizon, fopts);
    pred.labels = seed.labels;
    if (seed.time.size() && seed.dt) {
        pred.time.resize(a.horizon);
        for (Index k = 0; k < a.horizon; ++k) {
            pred.time[k] = seed.time[end - 1] + static_cast<double>(k + 1) * *seed.dt;
        }
    } else {
        pred.time = Vector::LinSpaced(a.horizon, static_cast<double>(end + 1), static_cast<double>(end + a.horizon));
    }
    write_series(a.out, pred);

    kv(out, "horizon", a.horizon);
    kv(out, "seed_end", end);
    if (truth) {
        const Vector e = exposure(truth->values.middleRows(a.truth_start - 1, a.horizon), pred.values);
        for (Index j = 0; j < e.size(); ++j) kv(out, "nrmse_" + label_of(pred, j), e[j]);
    }
    kv(out, "out", a.out);
    return kExitOk;
}

RemittancePanel load_panel(const ExposureArgs& a, TimeSeries& deposits_out) {
    const TimeSeries r = read_series(a.remittances);
    deposits_out = read_series(a.deposits);
    if (r.samples() != deposits_out.samples()) {
        throw UsageError("remittance and deposit files have different row counts (" +
                         std::to_string(r.samples()) + " vs " + std::to_string(deposits_out.samples()) + ")");
    }
    RemittancePanel panel;
    panel.remittances = r.values;
    panel.deposits = deposits_out.values;
    return panel;
}

int cmd_exposure(const ExposureArgs& a, std::ostream& out) {
    check_fraction(a.train_frac);
    if (!(a.delta > 0.0)) throw UsageError("--delta must be positive");
    if (!(a.epsilon >= 0.0)) throw UsageError("--epsilon must be non-negative");
    if (a.max_iter < 1) throw UsageError("--max-iter must be at least 1");

    TimeSeries deposits;
    const RemittancePanel panel = load_panel(a, deposits);
    const ModelKind kind = a.lagged ? ModelKind::Lagged : ModelKind::NonLagged;
    const Index lag = a.lagged ? 2 : 1;
    if (panel.quarters() < lag + 1) {
        throw UsageError(std::string(to_string(kind)) + " model needs at least " + std::to_string(lag + 1) +
                         " quarters, panel has " + std::to_string(panel.quarters()));
    }
    if (leading_rows(a.train_frac, panel.quarters()) < lag) {
        throw UsageError("training block is too short for the " + std::string(to_string(kind)) + " model");
    }

    ExposureOptions opts;
    opts.solver = {a.delta, a.max_iter, a.epsilon};
    opts.train_fraction = a.train_frac;
    opts.held_out_only = a.held_out_only;
    if (a.held_out_only && leading_rows(a.train_frac, panel.quarters()) >= panel.quarters()) {
        throw UsageError("--held-out-only needs --train-frac below 1");
    }

    RemittanceFit fit;
    ExposureReport report;
    try {
        report = exposure_report(panel, kind, opts, &fit);
    } catch (const DegenerateChannel& e) {
        const auto j = static_cast<Index>(e.channel());
        throw Error("deposit column '" + label_of(deposits, j) + "' (institution " + std::to_string(j + 1) +
                    ") is identically zero");
    }

    const Index m = report.exposures.size();
    const auto ranked = rank_exposures(report.exposures, m);
    std::vector<Index> rank(static_cast<std::size_t>(m));
    for (std::size_t k = 0; k < ranked.size(); ++k) {
        rank[static_cast<std::size_t>(ranked[k].institution - 1)] = static_cast<Index>(k + 1);
    }
    CsvTable table;
    table.header = {"institution", "exposure", "rank"};
    table.rows.resize(m, 3);
    for (Index j = 0; j < m; ++j) {
        table.rows(j, 0) = static_cast<double>(j + 1);
        table.rows(j, 1) = report.exposures[j];
        table.rows(j, 2) = static_cast<double>(rank[static_cast<std::size_t>(j)]);
    }
    write_text(a.out, format_csv(table));

    if (!a.adjacency.empty()) {
        const auto edges = coupling_edges(fit);
        CsvTable adj;
        adj.header = {"institution", "region", "lag", "weight"};
        adj.rows.resize(static_cast<Index>(edges.size()), 4);
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto row = static_cast<Index>(k);
            adj.rows(row, 0) = static_cast<double>(edges[k].institution);
            adj.rows(row, 1) = static_cast<double>(edges[k].region);
            adj.rows(row, 2) = edges[k].lag;
            adj.rows(row, 3) = edges[k].weight;
        }
        write_text(a.adjacency, format_csv(adj));
    }
    if (!a.fitted.empty()) {
        CsvTable fitted;
        fitted.header.push_back("t");
        for (Index j = 0; j < m; ++j) {
            fitted.header.push_back(label_of(deposits, j) + "_fitted");
            fitted.header.push_back(label_of(deposits, j) + "_observed");
        }
        const Index rows = report.fitted.rows();
        fitted.rows.resize(rows, 2 * m + 1);
        for (Index t = 0; t < rows; ++t) {
            fitted.rows(t, 0) = deposits.time[report.first_row + t];
            for (Index j = 0; j < m; ++j) {
                fitted.rows(t, 1 + 2 * j) = report.fitted(t, j);
                fitted.rows(t, 2 + 2 * j) = report.observed(t, j);
            }
        }
        write_text(a.fitted, format_csv(fitted));
    }

    kv(out, "kind", to_string(kind));
    kv(out, "quarters", panel.quarters());
    kv(out, "train_rows", fit.train_rows);
    kv(out, "evaluated_rows", report.fitted.rows());
    kv(out, "nnz", fit.model.diagnostics.nnz);
    kv(out, "rank", fit.model.diagnostics.rank);
    for (const auto& r : ranked) {
        kv(out, "exposure_" + label_of(deposits, r.institution - 1), r.exposure);
    }
    kv(out, "out", a.out);
    return kExitOk;
}

int cmd_suggest_lag(const SuggestLagArgs& a, std::ostream& out, std::ostream& err) {
    const TimeSeries input = read_series(a.input);
    if (input.samples() < 3) {
        throw UsageError("lag suggestion needs at least 3 samples, input has " + std::to_string(input.samples()));
    }
    const LagSuggestion s = suggest_lag(input);
    for (Index j = 0; j < input.variables(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (s.degenerate[ju]) {
            err << "warning: channel '" << label_of(input, j) << "' is constant; reporting lag 1\n";
        } else if (s.saturated[ju]) {
            err << "warning: autocorrelation of channel '" << label_of(input, j)
                << "' never drops below 1/e; reporting the largest lag tried\n";
        }
        kv(out, "lag_" + label_of(input, j), s.per_channel[ju]);
    }
    kv(out, "suggested", s.suggested);
    return kExitOk;
}

int cmd_synth_panel(const SynthPanelArgs& a, std::ostream& out) {
    if (a.regions < 1 || a.institutions < 1 || a.quarters < 1) {
        throw UsageError("--regions, --institutions and --quarters must be at least 1");
    }
    if (!(a.noise >= 0.0)) throw UsageError("--noise must be non-negative");
    const PlantedPanel p = synth_panel(a.regions, a.institutions, a.quarters, a.seed, a.noise, !a.non_lagged);
    const Vector quarters = Vector::LinSpaced(a.quarters, 1.0, static_cast<double>(a.quarters));

    TimeSeries r(p.panel.remittances);
    r.time = quarters;
    for (Index k = 0; k < a.regions; ++k) r.labels.push_back("r" + std::to_string(k + 1));
    TimeSeries d(p.panel.deposits);
    d.time = quarters;
    for (Index i = 0; i < a.institutions; ++i) d.labels.push_back("d" + std::to_string(i + 1));
    write_series(a.remittances, r);
    write_series(a.deposits, d);

    if (!a.planted.empty()) {
        CsvTable adj;
        adj.header = {"institution", "region", "lag", "weight"};
        std::vector<std::array<double, 4>> rows;
        for (Index i = 0; i < a.institutions; ++i) {
            rows.push_back({static_cast<double>(i + 1), 0.0, 0.0, p.bias[i]});
            for (Index k = 0; k < a.regions; ++k) {
                if (p.M1(i, k) != 0.0) rows.push_back({static_cast<double>(i + 1), static_cast<double>(k + 1), 1.0, p.M1(i, k)});
                if (p.M0(i, k) != 0.0) rows.push_back({static_cast<double>(i + 1), static_cast<double>(k + 1), 0.0, p.M0(i, k)});
            }
        }
        adj.rows.resize(static_cast<Index>(rows.size()), 4);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            for (Index c = 0; c < 4; ++c) adj.rows(static_cast<Index>(k), c) = rows[k][static_cast<std::size_t>(c)];
        }
        write_text(a.planted, format_csv(adj));
    }
    kv(out, "regions", a.regions);
    kv(out, "institutions", a.institutions);
    kv(out, "quarters", a.quarters);
    kv(out, "lagged", a.non_lagged ? "false" : "true");
    kv(out, "seed", std::to_string(a.seed));
    kv(out, "rng", std::string(Rng::kName));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparse regressive reservoir computer toolkit", "srrc"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate the nonlinear financial model to a CSV orbit");
    simulate->add_option("--regime", sim.regime, "Parameter preset")->check(CLI::IsMember({"chaotic", "periodic"}));
    simulate->add_option("--params", sim.params, "s,c,e")->delimiter(',')->expected(3);
    simulate->add_option("--ic", sim.ic, "x0,y0,z0")->delimiter(',')->expected(3);
    simulate->add_option("--samples", sim.samples, "Grid points on [0, t-end]")->capture_default_str();
    simulate->add_option("--t-end", sim.t_end, "Final time")->capture_default_str();
    simulate->add_option("--rtol", sim.rtol, "Relative tolerance")->capture_default_str();
    simulate->add_option("--atol", sim.atol, "Absolute tolerance")->capture_default_str();
    simulate->add_option("--out", sim.out, "Output CSV")->required();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Fit a sparse RRC model");
    train->add_option("--input", tr.input, "Input series CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--target", tr.target, "Target series CSV (omit for autoregressive)")->check(CLI::ExistingFile);
    train->add_option("--lag", tr.lag, "Delay window length L")->required();
    train->add_option("--order", tr.order, "Polynomial order p")->capture_default_str();
    train->add_option("--delta", tr.delta, "Rank threshold")->capture_default_str();
    train->add_option("--epsilon", tr.epsilon, "Support threshold (0 keeps every entry)")->capture_default_str();
    train->add_option("--max-iter", tr.max_iter, "Solver passes per column")->capture_default_str();
    train->add_option("--train-frac", tr.train_frac, "Leading fraction of rows used")->capture_default_str();
    train->add_option("--seed", tr.seed, "Seed for the compression sample")->capture_default_str();
    train->add_option("--nu", tr.nu, "Scale of the compression sample")->capture_default_str();
    train->add_option("--selector-offset", tr.selector_offset, "Output slot per block, 0 for the newest")
        ->capture_default_str();
    train->add_option("--out", tr.out, "Model file")->required();

    ForecastArgs fc;
    auto* fcast = app.add_subcommand("forecast", "Roll a trained model forward");
    fcast->add_option("--model", fc.model, "Model file")->required()->check(CLI::ExistingFile);
    fcast->add_option("--seed-data", fc.seed_data, "Series CSV supplying the initial window")
        ->required()
        ->check(CLI::ExistingFile);
    fcast->add_option("--seed-end", fc.seed_end, "1-based row closing the window (default: last row)");
    fcast->add_option("--horizon", fc.horizon, "Steps to predict")->required();
    fcast->add_option("--truth", fc.truth, "Series CSV to score against")->check(CLI::ExistingFile);
    fcast->add_option("--truth-start", fc.truth_start, "1-based truth row matching the first step")
        ->capture_default_str();
    fcast->add_option("--guard", fc.guard, "Blowup threshold as a multiple of the training range")
        ->capture_default_str();
    fcast->add_option("--out", fc.out, "Output CSV")->required();

    ExposureArgs ex;
    auto* expo = app.add_subcommand("exposure", "Fit deposits on remittances and rank institutions");
    expo->add_option("--remittances", ex.remittances, "Remittance panel CSV")->required()->check(CLI::ExistingFile);
    expo->add_option("--deposits", ex.deposits, "Deposit panel CSV")->required()->check(CLI::ExistingFile);
    expo->add_flag("--lagged", ex.lagged, "Also use the previous quarter's remittances");
    expo->add_option("--train-frac", ex.train_frac, "Leading fraction of quarters used")->capture_default_str();
    expo->add_option("--delta", ex.delta, "Rank threshold")->capture_default_str();
    expo->add_option("--epsilon", ex.epsilon, "Support threshold")->capture_default_str();
    expo->add_option("--max-iter", ex.max_iter, "Solver passes per column")->capture_default_str();
    expo->add_flag("--held-out-only", ex.held_out_only, "Score only quarters after the training block");
    expo->add_option("--out", ex.out, "Exposure report CSV")->required();
    expo->add_option("--adjacency", ex.adjacency, "CSV of nonzero coupling coefficients");
    expo->add_option("--fitted", ex.fitted, "CSV of fitted and observed deposits");

    SuggestLagArgs sl;
    auto* suggest = app.add_subcommand("suggest-lag", "Suggest L from per-channel autocorrelation");
    suggest->add_option("--input", sl.input, "Series CSV")->required()->check(CLI::ExistingFile);

    SynthPanelArgs sp;
    auto* synth = app.add_subcommand("synth-panel", "Write a planted remittance/deposit panel");
    synth->add_option("--regions", sp.regions)->capture_default_str();
    synth->add_option("--institutions", sp.institutions)->capture_default_str();
    synth->add_option("--quarters", sp.quarters)->capture_default_str();
    synth->add_option("--seed", sp.seed)->capture_default_str();
    synth->add_option("--noise", sp.noise, "Relative noise level")->capture_default_str();
    synth->add_flag("--non-lagged", sp.non_lagged, "Plant no dependence on the previous quarter");
    synth->add_option("--remittances", sp.remittances, "Output remittance CSV")->required();
    synth->add_option("--deposits", sp.deposits, "Output deposit CSV")->required();
    synth->add_option("--planted", sp.planted, "Output CSV of the planted coefficients");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*train) return cmd_train(tr, out);
        if (*fcast) return cmd_forecast(fc, out);
        if (*expo) return cmd_exposure(ex, out);
        if (*suggest) return cmd_suggest_lag(sl, out, err);
        if (*synth) return cmd_synth_panel(sp, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericBlowup& e) {
        err << "error: " << e.what() << '\n';
        out << "blowup_step=" << e.step() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace srrc::cli
