#include "ergochain/trend.hpp"

#include <algorithm>

namespace ergo {

std::string_view to_string(Trend t) {
    switch (t) {
        case Trend::divergent: return "divergent-trend";
        case Trend::bounded: return "bounded-trend";
        case Trend::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::size_t TrendPolicy::window(std::size_t horizon) const {
    const auto w = static_cast<std::size_t>(window_fraction * static_cast<double>(horizon));
    return std::clamp<std::size_t>(w, 1, std::max<std::size_t>(horizon, 1));
}

Trend TrendPolicy::classify(double tail, std::size_t w) const {
    if (w == 0) return Trend::inconclusive;
    if (tail / static_cast<double>(w) > divergence_threshold) return Trend::divergent;
    if (tail < bounded_threshold) return Trend::bounded;
    return Trend::inconclusive;
}

double tail_increment(std::span<const double> partial_sums, std::size_t window) {
    const std::size_t n = partial_sums.size();
    if (n == 0) return 0.0;
    const double last = partial_sums[n - 1];
    return window >= n ? last : last - partial_sums[n - 1 - window];
}

Trend classify_trend(std::span<const double> partial_sums, const TrendPolicy& policy) {
    if (partial_sums.empty()) return Trend::inconclusive;
    const std::size_t w = policy.window(partial_sums.size());
    return policy.classify(tail_increment(partial_sums, w), w);
}

}  // namespace ergo
