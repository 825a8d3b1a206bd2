#pragma once

// Sparse row-averaging matrix that merges duplicated Kronecker monomials.

#include <cstdint>
#include <vector>

#include "srrc/embedding.hpp"
#include "srrc/linalg.hpp"

namespace srrc {

/// Disjoint-support averaging matrix of shape rho x d.
///
/// Row i averages the feature indices in groups[i] with weight 1/|groups[i]|.
/// Groups are ordered by their smallest index and every index in [0, d) appears
/// in exactly one group, so the matrix has exactly d nonzero entries and its
/// pseudoinverse copies row value i back onto every index of group i.
struct CompressionMatrix {
    int n = 1;
    int lag = 1;
    int order = 1;
    Index cols = 0;                          ///< d = d_p(nL)
    std::vector<std::vector<Index>> groups;  ///< 0-based, ascending within each group

    Index rows() const { return static_cast<Index>(groups.size()); }
    Index nonzeros() const;
    /// Explicit dense rho x d matrix.
    Matrix dense() const;
    /// Throws InvalidArgument unless the groups partition [0, cols).
    void validate() const;

    bool operator==(const CompressionMatrix&) const = default;
};

/// 1e-9 * max(1, nu^p).
double default_grouping_eps(double nu, int p);

/// The random feature vector used to discover duplicate monomials: eth_map of
/// nu * N(0, 1)^{nL}, with its constant entry replaced by a further N(0, 1) draw.
Vector compression_sample(int n, int lag, int p, double nu, std::uint64_t seed,
                          std::uint64_t budget = kDefaultFeatureBudget);

/// Randomized construction: scanning j = 2..d, index j opens a new row holding
/// every k with |x_j - x_k| <= eps, provided j is the smallest such k.
/// Throws GroupingDegenerate when the result is not a partition or merges
/// monomials whose index multisets differ.
CompressionMatrix compression_matrix(int n, int lag, int p, double nu, double eps,
                                     std::uint64_t seed,
                                     std::uint64_t budget = kDefaultFeatureBudget);

/// Deterministic grouping by equality of sorted index multisets.
CompressionMatrix compression_matrix_exact(int n, int lag, int p,
                                           std::uint64_t budget = kDefaultFeatureBudget);

/// Class id of each eth_map index, classes numbered by first occurrence.
std::vector<Index> monomial_classes(std::uint64_t m, int p,
                                    std::uint64_t budget = kDefaultFeatureBudget);

/// R z: group means.
Vector compress(const CompressionMatrix& r, const Vector& z);
/// R Z applied column-wise.
Matrix compress_columns(const CompressionMatrix& r, const Matrix& z);
/// R^+ w: broadcast each row value to its group.
Vector decompress(const CompressionMatrix& r, const Vector& w);

/// Largest |z_a - z_b| over pairs sharing a group.
double max_group_spread(const CompressionMatrix& r, const Vector& z);

}  // namespace srrc
