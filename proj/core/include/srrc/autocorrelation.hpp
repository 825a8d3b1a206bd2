#pragma once

#include <vector>

#include "srrc/embedding.hpp"

namespace srrc {

/// Biased sample autocorrelation r(k), k = 0..max_lag. Zero-variance input
/// yields an empty vector.
Vector autocorrelation(const Vector& x, Index max_lag);

struct LagSuggestion {
    std::vector<Index> per_channel;  ///< first lag with r(k) < 1/e
    std::vector<bool> degenerate;    ///< constant channel, reported as lag 1
    std::vector<bool> saturated;     ///< never dropped below 1/e; reported as the largest lag tried
    Index suggested = 1;             ///< max over channels
};

/// Per-channel first lag at which the autocorrelation falls below 1/e.
/// Needs at least three samples.
LagSuggestion suggest_lag(const TimeSeries& series);

}  // namespace srrc
