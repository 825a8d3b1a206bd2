#pragma once

// Remittance -> deposit readouts and the per-institution exposure measure.

#include <cstdint>
#include <string>
#include <vector>

#include "srrc/rrc.hpp"

namespace srrc {

struct RemittancePanel {
    Matrix remittances;  ///< quarters x regions
    Matrix deposits;     ///< quarters x institutions
    std::vector<std::string> period_labels;

    Index quarters() const { return remittances.rows(); }
    Index regions() const { return remittances.cols(); }
    Index institutions() const { return deposits.cols(); }
    void validate() const;
};

enum class ModelKind { NonLagged, Lagged };

const char* to_string(ModelKind kind);

/// ceil(fraction * total), guarded against representation error in the product.
Index leading_rows(double fraction, Index total);

struct RemittanceFit {
    RRCModel model;          ///< readout over r(t) (L = 1) or [r(t-1), r(t)] (L = 2), p = 1
    ModelKind kind = ModelKind::NonLagged;
    double train_fraction = 0.95;
    Index train_rows = 0;    ///< leading panel rows the coefficients depend on
};

/// d(t) ~ M [r(t); 1]: one sparse matrix standing in for the K A product plus a constant bias.
RemittanceFit fit_nonlagged(const RemittancePanel& panel, const SolverConfig& solver,
                            double train_fraction = 0.95);
/// d(t) ~ M [r(t-1), r(t) interleaved per region; 1].
RemittanceFit fit_lagged(const RemittancePanel& panel, const SolverConfig& solver,
                         double train_fraction = 0.95);

/// Index of the first quarter the model can predict (0 for non-lagged, 1 for lagged).
Index first_predictable_row(ModelKind kind);

/// Predicted deposits for quarters first_predictable_row(kind) .. quarters-1.
Matrix predict_deposits(const RemittanceFit& fit, const RemittancePanel& panel);

/// sqrt(sum_t (fitted - observed)^2) / (sqrt(rows) * max_t |observed|), per column.
/// Throws DegenerateChannel when an observed column is identically zero.
Vector exposure(const Matrix& observed, const Matrix& fitted);

struct ExposureReport {
    Vector exposures;              ///< one per institution, >= 0
    Matrix fitted;                 ///< predictions over the evaluated rows
    Matrix observed;               ///< deposits over the evaluated rows
    Index first_row = 0;           ///< panel row of fitted.row(0)
    ModelKind kind = ModelKind::NonLagged;
    double train_fraction = 0.95;
};

struct ExposureOptions {
    SolverConfig solver{1e-8, 50, 1e-10};
    double train_fraction = 0.95;
    bool held_out_only = false;  ///< evaluate only rows after the training block
};

ExposureReport exposure_report(const RemittancePanel& panel, ModelKind kind,
                               const ExposureOptions& opts, RemittanceFit* fit_out = nullptr);

struct RankedExposure {
    Index institution;  ///< 1-based
    double exposure;
};

/// Top k by descending exposure, ties by ascending institution index.
std::vector<RankedExposure> rank_exposures(const Vector& exposures, Index k);

struct CouplingEdge {
    Index institution;  ///< 1-based
    Index region;       ///< 1-based; 0 denotes the constant bias input
    int lag;            ///< 0 for r(t), 1 for r(t-1)
    double weight;
};

/// Nonzero coefficients of a remittance readout, in row-major order.
std::vector<CouplingEdge> coupling_edges(const RemittanceFit& fit);

struct PlantedPanel {
    RemittancePanel panel;
    Matrix M0;    ///< institutions x regions, weights on r(t)
    Matrix M1;    ///< institutions x regions, weights on r(t-1); zero when not lagged
    Vector bias;  ///< constant deposit offset per institution
};

/// Smooth positive remittances (level + drift + quarterly seasonality) and deposits
/// from a planted sparse map. `noise_level` scales Gaussian noise on both, relative
/// to each series' mean level; zero gives an exactly representable panel.
PlantedPanel synth_panel(Index regions, Index institutions, Index quarters, std::uint64_t seed,
                         double noise_level, bool lagged = true);

}  // namespace srrc
