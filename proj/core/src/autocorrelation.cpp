#include "srrc/autocorrelation.hpp"

#include <algorithm>
#include <cmath>

#include "srrc/errors.hpp"

namespace srrc {

Vector autocorrelation(const Vector& x, Index max_lag) {
    const Index n = x.size();
    if (max_lag < 0 || max_lag >= n) throw InvalidArgument("max_lag must lie in [0, n)");
    const Vector centered = x.array() - x.mean();
    const double var = centered.squaredNorm();
    if (var == 0.0) return Vector(0);
    Vector r(max_lag + 1);
    for (Index k = 0; k <= max_lag; ++k) {
        r[k] = centered.head(n - k).dot(centered.tail(n - k)) / var;
    }
    return r;
}

LagSuggestion suggest_lag(const TimeSeries& series) {
    series.validate();
    const Index n = series.samples();
    if (n < 3) throw InvalidArgument("lag suggestion needs at least three samples");
    const double threshold = std::exp(-1.0);
    const Index max_lag = n - 2;

    LagSuggestion out;
    for (Index j = 0; j < series.variables(); ++j) {
        const Vector r = autocorrelation(series.values.col(j), max_lag);
        Index lag = max_lag;
        bool degenerate = r.size() == 0;
        bool saturated = false;
        if (degenerate) {
            lag = 1;
        } else {
            const auto* hit = std::find_if(r.data() + 1, r.data() + r.size(),
                                           [threshold](double v) { return v < threshold; });
            if (hit == r.data() + r.size()) {
                saturated = true;
            } else {
                lag = static_cast<Index>(hit - r.data());
            }
        }
        out.per_channel.push_back(lag);
        out.degenerate.push_back(degenerate);
        out.saturated.push_back(saturated);
    }
    out.suggested = *std::max_element(out.per_channel.begin(), out.per_channel.end());
    return out;
}

}  // namespace srrc
