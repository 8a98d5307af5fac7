#pragma once

#include "ergochain/agent_set.hpp"
#include "ergochain/chain.hpp"
#include "ergochain/interaction_graph.hpp"
#include "ergochain/limit_analysis.hpp"
#include "ergochain/trend.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ergo {

// Verdict pipelines that pair a finite-horizon reading of a theorem's
// hypotheses with the limit behaviour actually observed. Everything reported
// here is numeric evidence; disagreements are findings, not errors.

enum class Prediction { ergodic, not_ergodic, class_ergodic, not_class_ergodic, undetermined };
std::string_view to_string(Prediction p);

struct PipelineOptions {
    TrendPolicy trend;
    LimitTolerances limit;
    /// Empty: default_start_indices(horizon).
    std::vector<std::size_t> start_indices;
    /// Chain whose balanced asymmetry stands in for the analysed chain's when
    /// the two are l1-close (summable max-norm distance).
    std::optional<Chain> reference;
};

/// Worst-case absolute flow for one cardinality, both forms.
struct FlowCheck {
    AgentSet universe;  // the island, or everyone
    std::size_t cardinality = 0;
    Trend trend = Trend::inconclusive;          // two-sided cross flow
    double total = 0.0;
    Trend one_sided_trend = Trend::inconclusive;
    double one_sided_total = 0.0;
    /// Arg-min subset sequence of the two-sided minimisation.
    std::vector<AgentSet> witness;
};

struct TheoremReport {
    std::string theorem;
    std::size_t horizon = 0;

    // Hypothesis evidence (unused fields stay at their defaults).
    double balanced_asymmetry = 0.0;
    double delta = 0.0;
    double typesymmetry = 0.0;
    bool hypotheses_hold = false;
    std::string hypothesis_note;

    std::vector<FlowCheck> flows;
    std::optional<IslandPartition> islands;

    Prediction predicted = Prediction::undetermined;
    std::vector<LimitClassification> observed;  // one per start index
    LimitVerdict observed_verdict = LimitVerdict::inconclusive;
    /// Unset when there is no prediction to compare.
    std::optional<bool> agreement;
    /// Limit row groups vs. islands, when both are available.
    std::optional<bool> islands_match_limit;
    std::vector<std::string> findings;
};

/// classify_limit at each start index over default_horizons().
std::vector<LimitClassification> observe_limits(const Chain& chain, std::size_t horizon,
                                                const PipelineOptions& options,
                                                LimitVerdict* combined = nullptr);

/// Ergodic iff absolute infinite flow, for balanced-asymmetric chains.
TheoremReport theorem1_pipeline(const Chain& chain, std::size_t horizon,
                                const PipelineOptions& options = {});
/// Class-ergodic iff absolute infinite flow over each island.
TheoremReport theorem2_pipeline(const Chain& chain, std::size_t horizon,
                                const PipelineOptions& options = {});
/// Self-confident and type-symmetric implies class-ergodic.
TheoremReport theorem3_pipeline(const Chain& chain, std::size_t horizon,
                                const PipelineOptions& options = {});

}  // namespace ergo
