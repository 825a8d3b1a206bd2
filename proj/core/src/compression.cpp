#include "srrc/compression.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "srrc/errors.hpp"
#include "srrc/random.hpp"

namespace srrc {

namespace {

void check_params(int n, int lag, int p) {
    if (n < 1 || lag < 1 || p < 1) throw InvalidArgument("n, L and p must all be at least 1");
}

double group_mean(const Vector& z, const std::vector<Index>& group) {
    // Shifted sum: exact whenever every member equals the leader.
    const double lead = z[group.front()];
    double acc = 0.0;
    for (Index idx : group) acc += z[idx] - lead;
    return lead + acc / static_cast<double>(group.size());
}

}  // namespace

Index CompressionMatrix::nonzeros() const {
    Index total = 0;
    for (const auto& g : groups) total += static_cast<Index>(g.size());
    return total;
}

Matrix CompressionMatrix::dense() const {
    Matrix out = Matrix::Zero(rows(), cols);
    for (Index i = 0; i < rows(); ++i) {
        const auto& g = groups[static_cast<std::size_t>(i)];
        for (Index idx : g) out(i, idx) = 1.0 / static_cast<double>(g.size());
    }
    return out;
}

void CompressionMatrix::validate() const {
    std::vector<char> seen(static_cast<std::size_t>(cols), 0);
    Index prev_leader = -1;
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidArgument("compression matrix has an empty row");
        if (!std::is_sorted(g.begin(), g.end())) throw InvalidArgument("compression group not sorted");
        if (g.front() <= prev_leader) throw InvalidArgument("compression rows not ordered by leader");
        prev_leader = g.front();
        for (Index idx : g) {
            if (idx < 0 || idx >= cols) throw InvalidArgument("compression index out of range");
            auto& flag = seen[static_cast<std::size_t>(idx)];
            if (flag) throw InvalidArgument("compression groups overlap at index " + std::to_string(idx));
            flag = 1;
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw InvalidArgument("compression groups do not cover every feature index");
    }
}

double default_grouping_eps(double nu, int p) {
    return 1e-9 * std::max(1.0, std::pow(nu, p));
}

Vector compression_sample(int n, int lag, int p, double nu, std::uint64_t seed,
                          std::uint64_t budget) {
    check_params(n, lag, p);
    Rng rng(seed);
    const Vector y = nu * rng.normal_vector(static_cast<Index>(n) * lag);
    Vector x = eth_map(y, p, budget);
    x[x.size() - 1] = rng.normal();
    return x;
}

std::vector<Index> monomial_classes(std::uint64_t m, int p, std::uint64_t budget) {
    const auto d = static_cast<Index>(feature_dimension(m, p, budget));
    std::vector<Index> classes(static_cast<std::size_t>(d));
    std::map<std::vector<std::uint64_t>, Index> ids;
    Index next = 0;
    Index pos = 0;
    std::uint64_t block = 1;
    for (int k = 1; k <= p; ++k) {
        block *= m;
        std::vector<std::uint64_t> digits(static_cast<std::size_t>(k));
        for (std::uint64_t flat = 0; flat < block; ++flat, ++pos) {
            std::uint64_t rem = flat;
            for (int q = k - 1; q >= 0; --q) {
                digits[static_cast<std::size_t>(q)] = rem % m;
                rem /= m;
            }
            auto key = digits;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = ids.try_emplace(std::move(key), next);
            if (inserted) ++next;
            classes[static_cast<std::size_t>(pos)] = it->second;
        }
    }
    classes[static_cast<std::size_t>(d - 1)] = next;
    return classes;
}

CompressionMatrix compression_matrix_exact(int n, int lag, int p, std::uint64_t budget) {
    check_params(n, lag, p);
    const auto m = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(lag);
    const std::vector<Index> classes = monomial_classes(m, p, budget);
    CompressionMatrix r;
    r.n = n;
    r.lag = lag;
    r.order = p;
    r.cols = static_cast<Index>(classes.size());
    for (std::size_t idx = 0; idx < classes.size(); ++idx) {
        const auto cls = static_cast<std::size_t>(classes[idx]);
        if (cls == r.groups.size()) r.groups.emplace_back();
        r.groups[cls].push_back(static_cast<Index>(idx));
    }
    return r;
}

CompressionMatrix compression_matrix(int n, int lag, int p, double nu, double eps,
                                     std::uint64_t seed, std::uint64_t budget) {
    check_params(n, lag, p);
    if (!(nu > 0.0) || !(eps > 0.0)) throw InvalidArgument("nu and eps must be positive");
    const Vector x = compression_sample(n, lag, p, nu, seed, budget);
    const Index d = x.size();

    // Sorted view so each neighbourhood {k : |x_j - x_k| <= eps} is a contiguous run.
    std::vector<Index> by_value(static_cast<std::size_t>(d));
    std::iota(by_value.begin(), by_value.end(), Index{0});
    std::stable_sort(by_value.begin(), by_value.end(),
                     [&x](Index a, Index b) { return x[a] < x[b]; });
    std::vector<double> sorted(by_value.size());
    for (std::size_t i = 0; i < by_value.size(); ++i) sorted[i] = x[by_value[i]];

    CompressionMatrix r;
    r.n = n;
    r.lag = lag;
    r.order = p;
    r.cols = d;
    r.groups.push_back({0});
    for (Index j = 1; j < d; ++j) {
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x[j] - eps) - sorted.begin();
        const auto hi = std::upper_bound(sorted.begin(), sorted.end(), x[j] + eps) - sorted.begin();
        std::vector<Index> matches;
        for (auto s = lo; s < hi; ++s) {
            const Index k = by_value[static_cast<std::size_t>(s)];
            if (std::abs(x[j] - x[k]) <= eps) matches.push_back(k);
        }
        std::sort(matches.begin(), matches.end());
        if (!matches.empty() && matches.front() == j) r.groups.push_back(std::move(matches));
    }

    try {
        r.validate();
    } catch (const InvalidArgument& e) {
        throw GroupingDegenerate(std::string("randomized grouping is not a partition: ") + e.what());
    }
    const auto m = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(lag);
    const std::vector<Index> classes = monomial_classes(m, p, budget);
    for (const auto& g : r.groups) {
        for (Index idx : g) {
            if (classes[static_cast<std::size_t>(idx)] != classes[static_cast<std::size_t>(g.front())]) {
                throw GroupingDegenerate("grouping eps=" + std::to_string(eps) +
                                         " merged distinct monomials at indices " +
                                         std::to_string(g.front()) + " and " + std::to_string(idx));
            }
        }
    }
    return r;
}

Vector compress(const CompressionMatrix& r, const Vector& z) {
    if (z.size() != r.cols) {
        throw DimensionMismatch("compress: expected " + std::to_string(r.cols) + " entries, got " +
                                std::to_string(z.size()));
    }
    Vector out(r.rows());
    for (Index i = 0; i < r.rows(); ++i) out[i] = group_mean(z, r.groups[static_cast<std::size_t>(i)]);
    return out;
}

Matrix compress_columns(const CompressionMatrix& r, const Matrix& z) {
    if (z.rows() != r.cols) throw DimensionMismatch("compress: feature matrix has wrong row count");
    Matrix out(r.rows(), z.cols());
    for (Index c = 0; c < z.cols(); ++c) out.col(c) = compress(r, z.col(c));
    return out;
}

Vector decompress(const CompressionMatrix& r, const Vector& w) {
    if (w.size() != r.rows()) {
        throw DimensionMismatch("decompress: expected " + std::to_string(r.rows()) + " entries, got " +
                                std::to_string(w.size()));
    }
    Vector out(r.cols);
    for (Index i = 0; i < r.rows(); ++i) {
        for (Index idx : r.groups[static_cast<std::size_t>(i)]) out[idx] = w[i];
    }
    return out;
}

double max_group_spread(const CompressionMatrix& r, const Vector& z) {
    if (z.size() != r.cols) throw DimensionMismatch("max_group_spread: wrong vector length");
    double spread = 0.0;
    for (const auto& g : r.groups) {
        double lo = z[g.front()];
        double hi = lo;
        for (Index idx : g) {
            lo = std::min(lo, z[idx]);
            hi = std::max(hi, z[idx]);
        }
        spread = std::max(spread, hi - lo);
    }
    return spread;
}

}  // namespace srrc
