#pragma once

// Sparse regressive reservoir computers: training, evaluation and rollout.

#include <cstdint>
#include <string>

#include "srrc/compression.hpp"
#include "srrc/embedding.hpp"
#include "srrc/linalg.hpp"

namespace srrc {

struct TrainingDiagnostics {
    double residual_norm = 0.0;  ///< ||W_hat R H0 - H1||_F
    double target_norm = 0.0;    ///< ||H1||_F
    Index nnz = 0;               ///< nonzeros of W_hat
    Index rank = 0;              ///< rk_delta(R H0)
    Index samples = 0;           ///< training columns T - L + 1
    Vector residual_bounds;      ///< per output row, the solver's residual bound
    double data_range = 0.0;     ///< largest per-channel (max - min) of the training inputs
    double data_scale = 0.0;     ///< largest |value| of the training inputs
    bool converged = true;       ///< every solver column met the delta stopping rule
    std::uint64_t seed = 0;
    std::string rng;

    bool operator==(const TrainingDiagnostics& o) const;
};

/// Trained readout y = W_hat R eth_map(x_L(t)).
///
/// The output is `n_out` blocks of `target_lag` slots each. Models trained on
/// delay-embedded targets have n_out == n and target_lag == L; readouts onto
/// plain targets (one value per channel) have target_lag == 1.
struct RRCModel {
    int n = 1;
    int lag = 1;
    int order = 1;
    int n_out = 1;
    int target_lag = 1;
    int selector_offset = 1;  ///< 1-based slot exposed from each output block
    CompressionMatrix R;
    Matrix W_hat;             ///< (n_out * target_lag) x R.rows()
    TrainingDiagnostics diagnostics;

    Index window_size() const { return static_cast<Index>(n) * lag; }
    Index output_size() const { return static_cast<Index>(n_out) * target_lag; }
    /// Throws SchemaError when the fields are mutually inconsistent.
    void validate() const;

    bool operator==(const RRCModel& o) const;
};

/// n_out x (n_out * target_lag) 0/1 matrix; row j selects slot j*target_lag + offset - 1.
Matrix selector_matrix(int n_out, int target_lag, int selector_offset);

struct TrainOptions {
    double nu = 1.0;
    double grouping_eps = 0.0;  ///< <= 0 selects default_grouping_eps(nu, p)
    int selector_offset = 0;    ///< 0 selects the newest slot (L)
};

/// Fits W_hat (R H0) = H1 with sparse_lstsq on the transposed system.
RRCModel train_rrc(const TimeSeries& x, const TimeSeries& y, const EmbeddingConfig& cfg,
                   const SolverConfig& solver, std::uint64_t seed, const TrainOptions& opts = {});

/// train_rrc on the pairs (x_t, x_{t+1}), t = 1..T-1.
RRCModel train_autoregressive(const TimeSeries& x, const EmbeddingConfig& cfg,
                              const SolverConfig& solver, std::uint64_t seed,
                              const TrainOptions& opts = {});

/// Readout onto plain targets: row k of `targets` is the output at time L + k.
RRCModel train_readout(const TimeSeries& x, const Matrix& targets, const EmbeddingConfig& cfg,
                       const SolverConfig& solver, std::uint64_t seed,
                       const TrainOptions& opts = {});

/// Compressed features R eth_map(window).
Vector reduced_features(const RRCModel& model, const Vector& window);

struct Transformed {
    Vector dilated;   ///< W_hat R eth_map(window)
    Vector selected;  ///< one entry per output block
};

Transformed transform(const RRCModel& model, const Vector& window);

/// Drops the oldest entry of each L-block and appends next[j] to block j.
Vector advance_window(const Vector& window, int lag, const Vector& next);

struct ForecastOptions {
    /// A prediction with |value| above guard_factor * training range is a blowup.
    double guard_factor = 1e6;
};

/// Iterated one-step rollout from `seed_window` (layout of delay_embed).
/// Throws NumericBlowup when the divergence guard trips.
TimeSeries forecast(const RRCModel& model, const Vector& seed_window, Index horizon,
                    const ForecastOptions& opts = {});

}  // namespace srrc
