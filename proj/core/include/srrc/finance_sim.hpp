#pragma once

// Adaptive Dormand-Prince integration of the three-variable nonlinear
// financial model, sampled on a uniform grid.

#include <functional>

#include "srrc/embedding.hpp"
#include "srrc/linalg.hpp"

namespace srrc {

struct FinancialParams {
    double s = 3.0;   ///< savings
    double c = 0.1;   ///< cost
    double e = 1.0;   ///< elasticity
    double x0 = 2.0;
    double y0 = 3.0;
    double z0 = 2.0;

    static FinancialParams chaotic() { return {3.0, 0.1, 1.0, 2.0, 3.0, 2.0}; }
    static FinancialParams periodic() { return {0.5, 0.1, 0.1, 1.0, 1.0, 1.0}; }
};

struct SimulationGrid {
    double t_end = 120.0;
    Index samples = 12000;
    double rtol = 1e-9;
    double atol = 1e-11;

    void validate() const;
    /// t_k = k * t_end / (samples - 1).
    double time_at(Index k) const;
};

/// (x3 + (x2 - s) x1, 1 - c x2 - x1^2, -x1 - e x3)
Vector financial_rhs(const Vector& state, const FinancialParams& params);

using OdeRhs = std::function<Vector(double, const Vector&)>;

/// Dormand-Prince 5(4) with proportional step control (safety 0.9) and the
/// fourth-order continuous extension for grid output. Rows of the result are
/// the states at grid.time_at(k). Throws StepUnderflow if h < 1e-12 t_end.
Matrix integrate_ode(const OdeRhs& rhs, const Vector& y0, const SimulationGrid& grid);

/// Fixed-step Dormand-Prince (fifth-order update); returns the state at t_end.
Vector integrate_fixed(const OdeRhs& rhs, const Vector& y0, double t_end, Index steps);

/// Orbit of the financial model: columns x1, x2, x3, with `time` and `dt` set.
TimeSeries integrate(const FinancialParams& params, const SimulationGrid& grid);

}  // namespace srrc
