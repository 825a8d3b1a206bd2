#include "srrc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "srrc/errors.hpp"

namespace srrc {

namespace {

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        throw InvalidArgument(std::string(what) + " contains non-finite entries");
    }
}

void require_delta(double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw InvalidArgument("delta must be a positive finite number");
    }
}

// Indices sorted by decreasing |x|, equal magnitudes by ascending index.
std::vector<Index> magnitude_order(const Vector& x) {
    std::vector<Index> order(static_cast<std::size_t>(x.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&x](Index lhs, Index rhs) {
        return std::abs(x[lhs]) > std::abs(x[rhs]);
    });
    return order;
}

Index support_size(const Vector& x, double epsilon) {
    if (epsilon == 0.0) return x.size();
    Index count = 0;
    for (Index i = 0; i < x.size(); ++i) count += heaviside_delta(std::abs(x[i]), epsilon);
    return std::max<Index>(count, 1);
}

// Walks the first `candidates` entries of `order`, keeping a column of `a_hat`
// only when its component orthogonal to the columns already kept exceeds `delta`.
std::vector<Index> independent_support(const Matrix& a_hat, const std::vector<Index>& order,
                                       Index candidates, Index cap, double tolerance) {
    std::vector<Index> support;
    Matrix basis(a_hat.rows(), cap);
    Index kept = 0;
    for (Index k = 0; k < candidates && kept < cap; ++k) {
        const Index col = order[static_cast<std::size_t>(k)];
        Vector v = a_hat.col(col);
        const double original = v.norm();
        // Two passes of Gram-Schmidt keep the orthogonalisation stable.
        for (int pass = 0; pass < 2; ++pass) {
            for (Index b = 0; b < kept; ++b) v -= basis.col(b).dot(v) * basis.col(b);
        }
        const double norm = v.norm();
        if (original > 0.0 && norm > tolerance * original) {
            basis.col(kept++) = v / norm;
            support.push_back(col);
        }
    }
    return support;
}

}  // namespace

SVDFactors economy_svd(const Matrix& a) {
    require_finite(a, "matrix");
    SVDFactors f;
    const Index s = std::min(a.rows(), a.cols());
    if (s == 0) {
        f.U = Matrix(a.rows(), 0);
        f.S = Vector(0);
        f.V = Matrix(0, a.cols());
        return f;
    }
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericDecompositionError("singular value decomposition failed");
    }
    f.U = svd.matrixU();
    f.S = svd.singularValues();
    f.V = svd.matrixV().transpose();
    return f;
}

int heaviside_delta(double x, double delta) { return x > delta ? 1 : 0; }

Index rank_delta(const Vector& singular_values, double delta) {
    require_delta(delta);
    Index r = 0;
    for (Index j = 0; j < singular_values.size(); ++j) r += heaviside_delta(singular_values[j], delta);
    return r;
}

Index rank_delta(const Matrix& a, double delta) {
    require_delta(delta);
    return rank_delta(economy_svd(a).S, delta);
}

double support_bound_factor(Index rows, Index cols, Index rank) {
    const Index s = std::min(rows, cols);
    return std::sqrt(static_cast<double>(rank) * static_cast<double>(s - rank));
}

TruncatedProjector truncated_projector(const Matrix& a, double delta) {
    require_delta(delta);
    TruncatedProjector out;
    out.factors = economy_svd(a);
    out.rank = rank_delta(out.factors.S, delta);
    if (out.rank == 0) throw RankZeroError(delta);
    const auto ur = out.factors.U.leftCols(out.rank);
    out.Q = ur * ur.transpose();
    return out;
}

void SolverConfig::validate() const {
    require_delta(delta);
    if (max_iter < 1) throw InvalidArgument("max_iter must be at least 1");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw InvalidArgument("epsilon must be a non-negative finite number");
    }
}

Vector min_norm_lstsq(const Matrix& a, const Vector& y) {
    if (a.rows() != y.size()) throw DimensionMismatch("least-squares right-hand side has wrong length");
    if (a.cols() == 0) return Vector(0);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.solve(y);
}

SparseSolution sparse_lstsq(const Matrix& a, const Matrix& y, const SolverConfig& cfg) {
    cfg.validate();
    if (a.rows() != y.rows()) {
        throw DimensionMismatch("sparse_lstsq: A has " + std::to_string(a.rows()) +
                                " rows but Y has " + std::to_string(y.rows()));
    }
    require_finite(y, "right-hand side");

    const SVDFactors f = economy_svd(a);
    const Index r = rank_delta(f.S, cfg.delta);
    if (r == 0) throw RankZeroError(cfg.delta);

    const Index n = a.cols();
    const Index p = y.cols();
    const auto ur = f.U.leftCols(r);
    const Matrix a_hat = ur.transpose() * a;
    const Matrix y_hat = ur.transpose() * y;
    const Vector inv_s = f.S.head(r).cwiseInverse();
    const Matrix x_init = f.V.topRows(r).transpose() * (inv_s.asDiagonal() * y_hat);

    SparseSolution out;
    out.rank = r;
    out.X = Matrix::Zero(n, p);
    out.nnz_per_column.assign(static_cast<std::size_t>(p), 0);
    out.iterations_per_column.assign(static_cast<std::size_t>(p), 0);
    out.converged.assign(static_cast<std::size_t>(p), false);
    out.residual_norms = Vector::Zero(p);
    out.residual_bounds = Vector::Zero(p);

    const double s_factor = support_bound_factor(a.rows(), n, r);
    const double independence = std::max(cfg.delta / f.S[0], 64.0 * std::numeric_limits<double>::epsilon());

    for (Index j = 0; j < p; ++j) {
        const Vector target = y_hat.col(j);
        Vector x_prev = x_init.col(j);
        std::vector<Index> order = magnitude_order(x_prev);
        Index n0 = support_size(x_prev, cfg.epsilon);

        Vector x = Vector::Zero(n);
        Vector best;
        double best_residual = std::numeric_limits<double>::infinity();
        double error = 1.0 + cfg.delta;
        int k = 1;
        while (k <= cfg.max_iter && error > cfg.delta) {
            const std::vector<Index> support = independent_support(a_hat, order, n0, r, independence);
            Matrix restricted(r, static_cast<Index>(support.size()));
            for (std::size_t c = 0; c < support.size(); ++c) {
                restricted.col(static_cast<Index>(c)) = a_hat.col(support[c]);
            }
            const Vector coeffs = min_norm_lstsq(restricted, target);
            x.setZero();
            for (std::size_t c = 0; c < support.size(); ++c) x[support[c]] = coeffs[static_cast<Index>(c)];

            error = (x - x_prev).cwiseAbs().maxCoeff();
            x_prev = x;

            const double projected = (a_hat * x - target).norm();
            if (projected < best_residual) {
                best_residual = projected;
                best = x;
            }
            order = magnitude_order(x);
            n0 = support_size(x, cfg.epsilon);
            ++k;
        }

        const auto ju = static_cast<std::size_t>(j);
        out.iterations_per_column[ju] = k - 1;
        out.converged[ju] = error <= cfg.delta;
        const Vector& chosen = out.converged[ju] ? x : best;
        out.X.col(j) = chosen;
        out.nnz_per_column[ju] = static_cast<Index>((chosen.array() != 0.0).count());
        out.residual_norms[j] = (a * chosen - y.col(j)).norm();
        const double outside = (y.col(j) - ur * y_hat.col(j)).norm();
        out.residual_bounds[j] = chosen.norm() * s_factor * cfg.delta + outside;
    }
    return out;
}

}  // namespace srrc
