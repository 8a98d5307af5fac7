#pragma once

#include "ergochain/chain.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ergo {

enum class LimitVerdict { ergodic, class_ergodic, inconclusive };
std::string_view to_string(LimitVerdict v);

/// The weaker of two verdicts (ergodic < class-ergodic < inconclusive).
LimitVerdict weakest(LimitVerdict a, LimitVerdict b);

struct LimitTolerances {
    double limit = 1e-8;  // row agreement and stabilization
    double leak = 1e-8;   // mass a class row may place outside its class
};

struct HorizonResidual {
    std::size_t length = 0;     // n - k
    double row_spread = 0.0;    // max pairwise max-norm row distance of A(n,k)
    double change = 0.0;        // max entry change since the previous horizon
};

struct LimitClassification {
    LimitVerdict verdict = LimitVerdict::inconclusive;
    std::size_t start_index = 0;
    StochasticMatrix limit;  // A(k + last horizon, k)
    /// Near-equal row groups of the limit estimate (single linkage at the
    /// limit tolerance); the island partition when class-ergodic.
    std::vector<std::vector<std::size_t>> groups;
    std::vector<HorizonResidual> residuals;
    bool stabilized = false;
    double max_group_spread = 0.0;  // worst row distance inside a group
    double max_leak = 0.0;          // worst row mass outside its own group
};

/// Geometric lengths 2^4 ... 2^14 that fit in `available`, then `available`
/// itself if it is not already the last entry.
std::vector<std::size_t> default_horizons(std::size_t available);

/// {0, floor(N/10), floor(N/3)} without duplicates.
std::vector<std::size_t> default_start_indices(std::size_t horizon);

/// Classifies the backward products A(k + L, k) over the increasing lengths L.
/// Stabilized: the last two estimates differ entrywise by < tolerances.limit
/// (a single length L is compared against L - 1).
LimitClassification classify_limit(const Chain& chain, std::size_t k,
                                   std::span<const std::size_t> horizons,
                                   const LimitTolerances& tolerances = {});

}  // namespace ergo
