#pragma once

// Time-delay embedding, Kronecker power features and the structured data
// matrices assembled from them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srrc/linalg.hpp"

namespace srrc {

/// Default cap on the number of entries of a single feature vector.
inline constexpr std::uint64_t kDefaultFeatureBudget = 10'000'000;

/// n-variate sampled orbit; row t of `values` is the sample x_{t+1}.
struct TimeSeries {
    Matrix values;                      ///< T x n
    std::optional<double> dt;           ///< uniform sample spacing, if known
    std::vector<std::string> labels;    ///< empty or one per variable
    Vector time;                        ///< empty or one timestamp per sample

    TimeSeries() = default;
    explicit TimeSeries(Matrix v) : values(std::move(v)) {}

    Index samples() const { return values.rows(); }
    Index variables() const { return values.cols(); }

    /// Throws InvalidArgument unless T >= 1, n >= 1 and every value is finite.
    void validate() const;
    /// Rows [first, first + count) as a new series (metadata sliced alongside).
    TimeSeries slice(Index first, Index count) const;
};

struct EmbeddingConfig {
    int lag = 1;    ///< L, window length per variable
    int order = 1;  ///< p, highest Kronecker power
    std::uint64_t feature_budget = kDefaultFeatureBudget;

    void validate() const;
};

/// d_p(m) = m + m^2 + ... + m^p + 1. Throws FeatureBudgetExceeded above `budget`.
std::uint64_t feature_dimension(std::uint64_t m, int p,
                                std::uint64_t budget = kDefaultFeatureBudget);

/// x_L(t) for 1-based t in [L, T]: block j holds x^{(j)}_{t-L+1}, ..., x^{(j)}_t.
Vector delay_embed(const TimeSeries& series, int lag, Index t);

/// x^{(x)p}, ordered as x (x) x^{(x)(p-1)}.
///
/// Each entry is the product of its factors taken in ascending index order, so
/// entries whose multi-indices are permutations of each other are bit-identical.
Vector kron_power(const Vector& x, int p, std::uint64_t budget = kDefaultFeatureBudget);

/// [x; x^{(x)2}; ...; x^{(x)p}; 1], of length d_p(|x|).
Vector eth_map(const Vector& x, int p, std::uint64_t budget = kDefaultFeatureBudget);

struct DataMatrices {
    Matrix H0;           ///< d_p(nL) x (T - L + 1) features
    Matrix H1;           ///< nL x (T - L + 1) targets
    Index first_t = 0;   ///< 1-based time index of column 0 (== L)
    Index last_t = 0;    ///< 1-based time index of the last column (== T)
};

/// Feature matrix alone: column k is eth_map(delay_embed(x, L, L + k), p).
Matrix feature_matrix(const TimeSeries& x, const EmbeddingConfig& cfg);

/// Delay-embedded target matrix: column k is delay_embed(y, L, L + k).
Matrix window_matrix(const TimeSeries& y, int lag);

DataMatrices build_data_matrices(const TimeSeries& x, const TimeSeries& y,
                                 const EmbeddingConfig& cfg);

}  // namespace srrc
