#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace ergo {

/// Finite-horizon reading of whether a nonnegative series diverges. This is
/// trend evidence, never a proof.
enum class Trend { divergent, bounded, inconclusive };

std::string_view to_string(Trend t);

/// Tail-window heuristic shared by the flow series and the interaction graph.
///
/// Over the last W = max(1, floor(window_fraction * N)) terms of a series of
/// N partial sums:
///   divergent    if (tail increment) / W  > divergence_threshold
///   bounded      if (tail increment)      < bounded_threshold
///   inconclusive otherwise.
struct TrendPolicy {
    double window_fraction = 0.25;
    double divergence_threshold = 1e-8;
    double bounded_threshold = 1e-6;

    std::size_t window(std::size_t horizon) const;
    Trend classify(double tail_increment, std::size_t window) const;
};

/// Applies the policy to cumulative sums S_0 ... S_{N-1} (S_{-1} = 0).
Trend classify_trend(std::span<const double> partial_sums, const TrendPolicy& policy = {});

/// Tail increment S_{N-1} - S_{N-1-W} of a partial-sum series.
double tail_increment(std::span<const double> partial_sums, std::size_t window);

}  // namespace ergo
