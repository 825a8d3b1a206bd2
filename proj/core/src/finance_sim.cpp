#include "srrc/finance_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "srrc/errors.hpp"

namespace srrc {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[6][5] = {
    {0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
};
constexpr std::array<double, 6> kB{35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84};
// Difference between the fifth- and fourth-order weights (7 stages, FSAL).
constexpr std::array<double, 7> kE{-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920,
                                   17253.0 / 339200, -22.0 / 525, 1.0 / 40};
// Continuous extension: y(t + theta h) = y + h * sum_i k_i * sum_q P[i][q] theta^(q+1).
constexpr double kP[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0, 0, 0, 0},
    {0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

struct Step {
    Vector y_new;
    Vector f_new;
    std::array<Vector, 7> k;
};

// One Dormand-Prince step from (t, y) with derivative f0 = rhs(t, y).
Step dp_step(const OdeRhs& rhs, double t, const Vector& y, const Vector& f0, double h) {
    Step s;
    s.k[0] = f0;
    for (int i = 1; i < 6; ++i) {
        Vector yi = y;
        for (int j = 0; j < i; ++j) {
            if (kA[i][j] != 0.0) yi += h * kA[i][j] * s.k[static_cast<std::size_t>(j)];
        }
        s.k[static_cast<std::size_t>(i)] = rhs(t + kC[static_cast<std::size_t>(i)] * h, yi);
    }
    s.y_new = y;
    for (std::size_t i = 0; i < 6; ++i) {
        if (kB[i] != 0.0) s.y_new += h * kB[i] * s.k[i];
    }
    s.f_new = rhs(t + h, s.y_new);
    s.k[6] = s.f_new;
    return s;
}

double rms_norm(const Vector& v, const Vector& scale) {
    return std::sqrt((v.array() / scale.array()).square().mean());
}

double initial_step(const OdeRhs& rhs, double t0, const Vector& y0, const Vector& f0, double rtol,
                    double atol, double span) {
    const Vector scale = (atol + rtol * y0.array().abs()).matrix();
    const double d0 = rms_norm(y0, scale);
    const double d1 = rms_norm(f0, scale);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const Vector y1 = y0 + h0 * f0;
    const Vector f1 = rhs(t0 + h0, y1);
    const double d2 = rms_norm(f1 - f0, scale) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    return std::min({100.0 * h0, h1, span});
}

Vector dense_eval(const Step& s, const Vector& y_old, double h, double theta) {
    const std::array<double, 4> powers{theta, theta * theta, theta * theta * theta,
                                       theta * theta * theta * theta};
    Vector out = y_old;
    for (std::size_t i = 0; i < 7; ++i) {
        double w = 0.0;
        for (std::size_t q = 0; q < 4; ++q) w += kP[i][q] * powers[q];
        if (w != 0.0) out += h * w * s.k[i];
    }
    return out;
}

}  // namespace

void SimulationGrid::validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
    if (samples < 2) throw InvalidArgument("at least two samples are required");
    if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("tolerances must be positive");
}

double SimulationGrid::time_at(Index k) const {
    if (k == samples - 1) return t_end;
    return static_cast<double>(k) * t_end / static_cast<double>(samples - 1);
}

Vector financial_rhs(const Vector& state, const FinancialParams& params) {
    if (state.size() != 3) throw DimensionMismatch("financial model state has three components");
    const double x1 = state[0];
    const double x2 = state[1];
    const double x3 = state[2];
    Vector out(3);
    out << x3 + (x2 - params.s) * x1, 1.0 - params.c * x2 - x1 * x1, -x1 - params.e * x3;
    return out;
}

Matrix integrate_ode(const OdeRhs& rhs, const Vector& y0, const SimulationGrid& grid) {
    grid.validate();
    if (!y0.allFinite()) throw InvalidArgument("initial state must be finite");
    const Index dim = y0.size();
    Matrix out(grid.samples, dim);
    out.row(0) = y0.transpose();
    Index next = 1;

    const double min_step = 1e-12 * grid.t_end;
    double t = 0.0;
    Vector y = y0;
    Vector f = rhs(t, y);
    double h = initial_step(rhs, t, y, f, grid.rtol, grid.atol, grid.t_end);

    while (next < grid.samples) {
        if (h < min_step) throw StepUnderflow(t, h);
        bool last = false;
        if (t + h >= grid.t_end || grid.t_end - (t + h) < min_step) {
            h = grid.t_end - t;
            last = true;
        }
        const Step s = dp_step(rhs, t, y, f, h);
        Vector err = Vector::Zero(dim);
        for (std::size_t i = 0; i < 7; ++i) {
            if (kE[i] != 0.0) err += h * kE[i] * s.k[i];
        }
        const Vector scale =
            (grid.atol + grid.rtol * y.array().abs().max(s.y_new.array().abs())).matrix();
        const double err_norm = rms_norm(err, scale);
        if (!std::isfinite(err_norm)) {
            h *= kMinFactor;
            continue;
        }
        if (err_norm > 1.0) {
            h *= std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2));
            continue;
        }

        const double t_new = last ? grid.t_end : t + h;
        while (next < grid.samples) {
            const double tk = grid.time_at(next);
            if (tk > t_new) break;
            if (tk == t_new) {
                out.row(next) = s.y_new.transpose();
            } else {
                out.row(next) = dense_eval(s, y, h, (tk - t) / h).transpose();
            }
            ++next;
        }
        t = t_new;
        y = s.y_new;
        f = s.f_new;
        const double factor = err_norm == 0.0 ? kMaxFactor
                                              : std::min(kMaxFactor, kSafety * std::pow(err_norm, -0.2));
        h *= factor;
        if (last) break;
    }
    if (next != grid.samples) throw StepUnderflow(t, h);
    return out;
}

Vector integrate_fixed(const OdeRhs& rhs, const Vector& y0, double t_end, Index steps) {
    if (steps < 1) throw InvalidArgument("fixed-step integration needs at least one step");
    const double h = t_end / static_cast<double>(steps);
    Vector y = y0;
    for (Index i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * h;
        y = dp_step(rhs, t, y, rhs(t, y), h).y_new;
    }
    return y;
}

TimeSeries integrate(const FinancialParams& params, const SimulationGrid& grid) {
    Vector y0(3);
    y0 << params.x0, params.y0, params.z0;
    const OdeRhs rhs = [&params](double, const Vector& state) { return financial_rhs(state, params); };
    TimeSeries out(integrate_ode(rhs, y0, grid));
    out.dt = grid.t_end / static_cast<double>(grid.samples - 1);
    out.labels = {"x1", "x2", "x3"};
    out.time.resize(grid.samples);
    for (Index k = 0; k < grid.samples; ++k) out.time[k] = grid.time_at(k);
    return out;
}

}  // namespace srrc
