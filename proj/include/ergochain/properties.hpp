#pragma once

#include "ergochain/agent_set.hpp"
#include "ergochain/chain.hpp"
#include "ergochain/trend.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ergo {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Verdict { holds, fails, inconclusive };
std::string_view to_string(Verdict v);

/// Cumulative sums of a nonnegative per-step quantity, with a trend verdict.
struct FlowSeries {
    std::vector<double> partial_sums;
    Trend trend = Trend::inconclusive;
    /// Fixed cut, when the series was computed for one.
    std::optional<AgentSet> cut;
    /// Subset sequence T(0..N) behind the series (the arg-min for worst-case runs).
    std::vector<AgentSet> witness;

    double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

/// min over n < horizon and i of a_ii(n).
double self_confidence(const Chain& chain, std::size_t horizon);

/// Tight M with a_ij(n) <= M a_ji(n) for all i != j, n < horizon.
/// +inf when some a_ij(n) > 0 meets a_ji(n) = 0. Returns 1 when no pair
/// constrains M.
double subsymmetry_constant(const Chain& chain, std::size_t horizon);

/// Tight M over all proper nonempty cuts T:
///   sum_{i in T, j notin T} a_ij(n) <= M sum_{i notin T, j in T} a_ij(n).
double typesymmetry_constant(const Chain& chain, std::size_t horizon);

/// Tight M >= 1 over all equal-cardinality pairs (S1, S2):
///   sum_{i in S1, j notin S2} a_ij(n) <= M sum_{i notin S1, j in S2} a_ij(n).
double balanced_asymmetry_constant(const Chain& chain, std::size_t horizon);

/// Cumulative max-norm distances sum_m ||A_m - B_m||, positionally aligned.
FlowSeries l1_distance(const Chain& a, const Chain& b, std::size_t horizon,
                       const TrendPolicy& policy = {});

/// Cut flow across a fixed T. Two-sided: sum_{i in T, j notin T} (a_ij + a_ji).
/// One-sided: sum_{i notin T, j in T} a_ij.
FlowSeries infinite_flow_series(const Chain& chain, AgentSet cut, std::size_t horizon,
                                bool one_sided = false, const TrendPolicy& policy = {});

/// Cross flow along a subset sequence T(0), ..., T(horizon), all of one size.
/// Step n contributes
///   sum_{i in T(n+1), j notin T(n)} a_ij(n) + sum_{i notin T(n+1), j in T(n)} a_ij(n)
/// or only the second sum when one-sided.
FlowSeries absolute_flow_series(const Chain& chain, std::span<const AgentSet> subsets,
                                std::size_t horizon, bool one_sided = false,
                                const TrendPolicy& policy = {});

/// Minimum of the absolute cross flow over every subset sequence of the given
/// cardinality inside `universe` (complements taken within `universe`), by
/// forward dynamic programming on the current subset. partial_sums[n] is the
/// minimum achievable sum up to step n; the witness realizes the final one.
FlowSeries absolute_flow_worst_case(const Chain& chain, std::size_t cardinality,
                                    std::size_t horizon, bool one_sided = false,
                                    const TrendPolicy& policy = {},
                                    std::optional<AgentSet> universe = std::nullopt);

struct PropertyReport {
    std::size_t horizon = 0;
    double delta = 0.0;
    double m_subsym = kInfinity;
    double m_typesym = kInfinity;
    double m_balanced = kInfinity;
    /// Keys: self-confidence, sub-symmetry, type-symmetry, balanced-asymmetry.
    std::map<std::string, Verdict> verdicts;
};

/// All constants at once. Enumeration-based constants are left +inf with an
/// inconclusive verdict when the chain exceeds kMaxExhaustiveAgents.
PropertyReport compute_properties(const Chain& chain, std::size_t horizon);

}  // namespace ergo
