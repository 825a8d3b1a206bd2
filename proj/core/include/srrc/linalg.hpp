#pragma once

// Truncated-SVD numerical rank, orthogonal projectors and the greedy sparse
// least-squares solver used by every identification routine.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace srrc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Economy SVD stored so that U * S.asDiagonal() * V == A.
struct SVDFactors {
    Matrix U;  ///< m x s, orthonormal columns
    Vector S;  ///< s singular values, non-increasing
    Matrix V;  ///< s x n, orthonormal rows
};

SVDFactors economy_svd(const Matrix& a);

/// H_delta(x): 1 iff x > delta.
int heaviside_delta(double x, double delta);

/// Number of singular values strictly greater than delta.
Index rank_delta(const Matrix& a, double delta);
Index rank_delta(const Vector& singular_values, double delta);

/// s_{n,m}(r) = sqrt(r * (min(m, n) - r)).
double support_bound_factor(Index rows, Index cols, Index rank);

struct TruncatedProjector {
    Matrix Q;    ///< m x m, sum of the leading r outer products u_j u_j^T
    Index rank;  ///< r = rank_delta(A, delta)
    SVDFactors factors;
};

/// Rank-r orthogonal projector onto the leading left singular subspace.
/// Throws RankZeroError when rank_delta(A, delta) == 0.
TruncatedProjector truncated_projector(const Matrix& a, double delta);

struct SolverConfig {
    double delta = 1e-6;  ///< singular value and convergence threshold
    int max_iter = 50;    ///< iteration cap N per column
    /// Support inclusion threshold. Zero disables thresholding: every
    /// candidate column is kept (subject to the rank cap).
    double epsilon = 1e-8;

    void validate() const;
};

struct SparseSolution {
    Matrix X;                                 ///< n x p coefficients
    std::vector<Index> nnz_per_column;
    std::vector<int> iterations_per_column;   ///< equals max_iter when not converged
    std::vector<bool> converged;
    Vector residual_norms;                    ///< ||A x_j - y_j||
    Vector residual_bounds;                   ///< ||x_j|| s(r) delta + ||(I - Q) y_j||
    Index rank = 0;                           ///< rank_delta(A, delta)
};

/// Greedy truncated-SVD sparse least squares, one independent pass per column of Y.
///
/// Every column is initialised from the delta-truncated pseudoinverse solution
/// in the leading r-dimensional left singular subspace. Each pass ranks entries
/// by magnitude (stable, ties by ascending index), keeps the leading entries above
/// epsilon, discards candidates whose projected column keeps at most a
/// max(delta / sigma_1, 64 eps) fraction of its norm outside the span of the ones
/// already kept (at most r are kept), and re-solves the restricted
/// problem by minimum-norm least squares. Iteration stops once the sup-norm change
/// is at most delta, or after max_iter passes, in which case the iterate with the
/// smallest projected residual is returned.
SparseSolution sparse_lstsq(const Matrix& a, const Matrix& y, const SolverConfig& cfg);

/// Minimum-norm least-squares solution of a x = y via SVD.
Vector min_norm_lstsq(const Matrix& a, const Vector& y);

}  // namespace srrc
