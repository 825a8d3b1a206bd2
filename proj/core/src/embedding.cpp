#include "srrc/embedding.hpp"

#include <algorithm>
#include <string>

#include "srrc/errors.hpp"

namespace srrc {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t budget) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out) || out > budget) {
        throw FeatureBudgetExceeded("feature vector exceeds the budget of " +
                                    std::to_string(budget) + " entries");
    }
    return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, std::uint64_t budget) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a, b, &out) || out > budget) {
        throw FeatureBudgetExceeded("feature vector exceeds the budget of " +
                                    std::to_string(budget) + " entries");
    }
    return out;
}

// Writes x^{(x)p} into out[0, m^p).
void write_kron_power(const Vector& x, int p, double* out, std::uint64_t size) {
    const auto m = static_cast<std::uint64_t>(x.size());
    std::vector<std::uint64_t> digits(static_cast<std::size_t>(p));
    for (std::uint64_t flat = 0; flat < size; ++flat) {
        std::uint64_t rem = flat;
        for (int k = p - 1; k >= 0; --k) {
            digits[static_cast<std::size_t>(k)] = rem % m;
            rem /= m;
        }
        std::sort(digits.begin(), digits.end());
        double prod = x[static_cast<Index>(digits[0])];
        for (std::size_t k = 1; k < digits.size(); ++k) prod *= x[static_cast<Index>(digits[k])];
        out[flat] = prod;
    }
}

}  // namespace

void TimeSeries::validate() const {
    if (values.rows() < 1 || values.cols() < 1) {
        throw InvalidArgument("time series needs at least one sample and one variable");
    }
    if (!values.allFinite()) throw InvalidArgument("time series contains non-finite values");
    if (!labels.empty() && static_cast<Index>(labels.size()) != values.cols()) {
        throw DimensionMismatch("time series label count does not match variable count");
    }
    if (time.size() != 0 && time.size() != values.rows()) {
        throw DimensionMismatch("time series timestamp count does not match sample count");
    }
}

TimeSeries TimeSeries::slice(Index first, Index count) const {
    if (first < 0 || count < 0 || first + count > values.rows()) {
        throw OutOfRange("time series slice out of range");
    }
    TimeSeries out(values.middleRows(first, count));
    out.dt = dt;
    out.labels = labels;
    if (time.size() != 0) out.time = time.segment(first, count);
    return out;
}

void EmbeddingConfig::validate() const {
    if (lag < 1) throw InvalidArgument("lag L must be at least 1");
    if (order < 1) throw InvalidArgument("tensor order p must be at least 1");
}

std::uint64_t feature_dimension(std::uint64_t m, int p, std::uint64_t budget) {
    if (p < 1) throw InvalidArgument("tensor order p must be at least 1");
    if (m < 1) throw InvalidArgument("feature input must have at least one entry");
    // Sum form; the closed form m(m^p - 1)/(m - 1) + 1 is singular at m = 1.
    std::uint64_t total = 1;
    std::uint64_t power = 1;
    for (int k = 1; k <= p; ++k) {
        power = checked_mul(power, m, budget);
        total = checked_add(total, power, budget);
    }
    return total;
}

Vector delay_embed(const TimeSeries& series, int lag, Index t) {
    if (lag < 1) throw InvalidArgument("lag L must be at least 1");
    const Index T = series.samples();
    if (t < lag || t > T) {
        throw OutOfRange("delay_embed: t=" + std::to_string(t) + " outside [" +
                         std::to_string(lag) + ", " + std::to_string(T) + "]");
    }
    const Index n = series.variables();
    Vector out(n * lag);
    for (Index j = 0; j < n; ++j) {
        out.segment(j * lag, lag) = series.values.col(j).segment(t - lag, lag);
    }
    return out;
}

Vector kron_power(const Vector& x, int p, std::uint64_t budget) {
    if (p < 1) throw InvalidArgument("tensor order p must be at least 1");
    if (x.size() < 1) throw InvalidArgument("kron_power of an empty vector");
    std::uint64_t size = 1;
    for (int k = 0; k < p; ++k) size = checked_mul(size, static_cast<std::uint64_t>(x.size()), budget);
    Vector out(static_cast<Index>(size));
    write_kron_power(x, p, out.data(), size);
    return out;
}

Vector eth_map(const Vector& x, int p, std::uint64_t budget) {
    const std::uint64_t d = feature_dimension(static_cast<std::uint64_t>(x.size()), p, budget);
    Vector out(static_cast<Index>(d));
    std::uint64_t offset = 0;
    std::uint64_t block = 1;
    for (int k = 1; k <= p; ++k) {
        block *= static_cast<std::uint64_t>(x.size());
        write_kron_power(x, k, out.data() + offset, block);
        offset += block;
    }
    out[static_cast<Index>(d - 1)] = 1.0;
    return out;
}

Matrix feature_matrix(const TimeSeries& x, const EmbeddingConfig& cfg) {
    cfg.validate();
    x.validate();
    const Index T = x.samples();
    if (T < cfg.lag) throw InvalidArgument("series shorter than the lag window");
    const auto m = static_cast<std::uint64_t>(x.variables() * cfg.lag);
    const auto d = static_cast<Index>(feature_dimension(m, cfg.order, cfg.feature_budget));
    const Index cols = T - cfg.lag + 1;
    Matrix h0(d, cols);
    for (Index k = 0; k < cols; ++k) {
        h0.col(k) = eth_map(delay_embed(x, cfg.lag, cfg.lag + k), cfg.order, cfg.feature_budget);
    }
    return h0;
}

Matrix window_matrix(const TimeSeries& y, int lag) {
    if (lag < 1) throw InvalidArgument("lag L must be at least 1");
    y.validate();
    const Index T = y.samples();
    if (T < lag) throw InvalidArgument("series shorter than the lag window");
    const Index cols = T - lag + 1;
    Matrix h1(y.variables() * lag, cols);
    for (Index k = 0; k < cols; ++k) h1.col(k) = delay_embed(y, lag, lag + k);
    return h1;
}

DataMatrices build_data_matrices(const TimeSeries& x, const TimeSeries& y,
                                 const EmbeddingConfig& cfg) {
    if (x.samples() != y.samples()) {
        throw DimensionMismatch("input and target series have different lengths (" +
                                std::to_string(x.samples()) + " vs " +
                                std::to_string(y.samples()) + ")");
    }
    if (x.variables() != y.variables()) {
        throw DimensionMismatch("input and target series have different variable counts");
    }
    DataMatrices out;
    out.H0 = feature_matrix(x, cfg);
    out.H1 = window_matrix(y, cfg.lag);
    out.first_t = cfg.lag;
    out.last_t = x.samples();
    return out;
}

}  // namespace srrc
