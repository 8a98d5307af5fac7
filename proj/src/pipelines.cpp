#include "ergochain/pipelines.hpp"

#include "ergochain/errors.hpp"
#include "ergochain/properties.hpp"

#include <cmath>
#include <sstream>

namespace ergo {

std::string_view to_string(Prediction p) {
    switch (p) {
        case Prediction::ergodic: return "ergodic";
        case Prediction::not_ergodic: return "not-ergodic";
        case Prediction::class_ergodic: return "class-ergodic";
        case Prediction::not_class_ergodic: return "not-class-ergodic";
        case Prediction::undetermined: return "undetermined";
    }
    return "undetermined";
}

std::vector<LimitClassification> observe_limits(const Chain& chain, std::size_t horizon,
                                                const PipelineOptions& options,
                                                LimitVerdict* combined) {
    if (horizon == 0 || horizon > chain.length()) {
        throw IndexOutOfRange("pipeline horizon must lie in [1, chain length]");
    }
    const auto starts =
        options.start_indices.empty() ? default_start_indices(horizon) : options.start_indices;
    std::vector<LimitClassification> out;
    LimitVerdict verdict = LimitVerdict::ergodic;
    for (std::size_t offset : starts) {
        if (offset >= horizon) continue;
        const auto lengths = default_horizons(horizon - offset);
        out.push_back(classify_limit(chain, chain.start_index() + offset, lengths, options.limit));
        verdict = weakest(verdict, out.back().verdict);
    }
    if (out.empty()) verdict = LimitVerdict::inconclusive;
    if (combined != nullptr) *combined = verdict;
    return out;
}

namespace {

struct BalancedEvidence {
    double constant = kInfinity;
    bool holds = false;
    std::string note;
};

BalancedEvidence balanced_evidence(const Chain& chain, std::size_t horizon,
                                   const PipelineOptions& options) {
    BalancedEvidence e;
    if (options.reference) {
        const auto dist = l1_distance(chain, *options.reference, horizon, options.trend);
        e.constant = balanced_asymmetry_constant(*options.reference, horizon);
        const bool close = dist.trend == Trend::bounded;
        e.holds = close && std::isfinite(e.constant);
        std::ostringstream os;
        os << "reference chain: l1 distance " << to_string(dist.trend) << " (total " << dist.total()
           << "), balanced asymmetry M = " << e.constant;
        e.note = os.str();
    } else {
        e.constant = balanced_asymmetry_constant(chain, horizon);
        e.holds = std::isfinite(e.constant);
        std::ostringstream os;
        os << "balanced asymmetry M = " << e.constant << " on the realized horizon";
        e.note = os.str();
    }
    return e;
}

FlowCheck flow_check(const Chain& chain, std::size_t horizon, std::size_t c, AgentSet universe,
                     const TrendPolicy& policy) {
    FlowCheck f;
    f.universe = universe;
    f.cardinality = c;
    auto two = absolute_flow_worst_case(chain, c, horizon, false, policy, universe);
    auto one = absolute_flow_worst_case(chain, c, horizon, true, policy, universe);
    f.trend = two.trend;
    f.total = two.total();
    f.one_sided_trend = one.trend;
    f.one_sided_total = one.total();
    f.witness = std::move(two.witness);
    return f;
}

/// divergent for all -> true, any bounded -> false, otherwise unknown.
std::optional<bool> all_divergent(const std::vector<FlowCheck>& flows) {
    bool unknown = false;
    for (const auto& f : flows) {
        if (f.trend == Trend::bounded) return false;
        if (f.trend != Trend::divergent) unknown = true;
    }
    if (unknown) return std::nullopt;
    return true;
}

void note_form_disagreements(TheoremReport& r) {
    for (const auto& f : r.flows) {
        if (f.trend != f.one_sided_trend) {
            std::ostringstream os;
            os << "two-sided and one-sided worst-case flows disagree on " << f.universe.to_string()
               << " with cardinality " << f.cardinality << ": " << to_string(f.trend) << " vs "
               << to_string(f.one_sided_trend);
            r.findings.push_back(os.str());
        }
    }
}

bool consensus_observed(LimitVerdict v) { return v == LimitVerdict::ergodic; }
bool multiple_consensus_observed(LimitVerdict v) {
    return v == LimitVerdict::ergodic || v == LimitVerdict::class_ergodic;
}

void attach_islands(TheoremReport& r, const Chain& chain, std::size_t horizon,
                    const PipelineOptions& options) {
    const auto totals = accumulate_interactions(chain, horizon, options.trend);
    r.islands = islands(build_digraph(totals, options.trend));
    if (!r.islands->reachability_symmetric) {
        r.findings.push_back(
            "reachability in the strong interaction digraph is not symmetric; islands are "
            "reported as strongly connected components");
    }
}

void compare_islands(TheoremReport& r) {
    if (!r.islands) return;
    bool any = false;
    bool match = true;
    for (const auto& obs : r.observed) {
        if (obs.verdict == LimitVerdict::inconclusive) continue;
        any = true;
        if (!same_partition(obs.groups, r.islands->classes)) {
            match = false;
            std::ostringstream os;
            os << "limit row groups at k = " << obs.start_index
               << " differ from the interaction-graph islands";
            r.findings.push_back(os.str());
        }
    }
    if (any) r.islands_match_limit = match;
}

void compare(TheoremReport& r, bool (*observed_positive)(LimitVerdict), Prediction positive) {
    if (r.predicted == Prediction::undetermined) return;
    r.agreement = (r.predicted == positive) == observed_positive(r.observed_verdict);
    if (!*r.agreement) {
        std::ostringstream os;
        os << "prediction " << to_string(r.predicted) << " disagrees with observed "
           << to_string(r.observed_verdict);
        r.findings.push_back(os.str());
    }
}

}  // namespace

TheoremReport theorem1_pipeline(const Chain& chain, std::size_t horizon,
                                const PipelineOptions& options) {
    TheoremReport r;
    r.theorem = "theorem1";
    r.horizon = horizon;
    const std::size_t s = chain.agents();
    require_exhaustive_size(s);

    const auto balanced = balanced_evidence(chain, horizon, options);
    r.balanced_asymmetry = balanced.constant;
    r.hypotheses_hold = balanced.holds;
    r.hypothesis_note = balanced.note;

    const AgentSet everyone = AgentSet::all(s);
    for (std::size_t c = 1; c < s; ++c) {
        r.flows.push_back(flow_check(chain, horizon, c, everyone, options.trend));
    }
    note_form_disagreements(r);

    if (r.hypotheses_hold) {
        const auto divergent = all_divergent(r.flows);
        if (divergent) r.predicted = *divergent ? Prediction::ergodic : Prediction::not_ergodic;
    } else {
        r.findings.push_back("balanced asymmetry not established; no prediction");
    }

    r.observed = observe_limits(chain, horizon, options, &r.observed_verdict);
    compare(r, consensus_observed, Prediction::ergodic);
    return r;
}

TheoremReport theorem2_pipeline(const Chain& chain, std::size_t horizon,
                                const PipelineOptions& options) {
    TheoremReport r;
    r.theorem = "theorem2";
    r.horizon = horizon;
    require_exhaustive_size(chain.agents());

    const auto balanced = balanced_evidence(chain, horizon, options);
    r.balanced_asymmetry = balanced.constant;
    r.hypotheses_hold = balanced.holds;
    r.hypothesis_note = balanced.note;

    attach_islands(r, chain, horizon, options);
    for (const AgentSet island : r.islands->as_sets()) {
        for (std::size_t c = 1; c < island.count(); ++c) {
            r.flows.push_back(flow_check(chain, horizon, c, island, options.trend));
        }
    }
    note_form_disagreements(r);

    if (r.hypotheses_hold) {
        const auto divergent = all_divergent(r.flows);
        if (divergent) {
            r.predicted = *divergent ? Prediction::class_ergodic : Prediction::not_class_ergodic;
        }
    } else {
        r.findings.push_back("balanced asymmetry not established; no prediction");
    }

    r.observed = observe_limits(chain, horizon, options, &r.observed_verdict);
    compare(r, multiple_consensus_observed, Prediction::class_ergodic);
    compare_islands(r);
    return r;
}

TheoremReport theorem3_pipeline(const Chain& chain, std::size_t horizon,
                                const PipelineOptions& options) {
    TheoremReport r;
    r.theorem = "theorem3";
    r.horizon = horizon;
    require_exhaustive_size(chain.agents());

    std::ostringstream note;
    if (options.reference) {
        const auto dist = l1_distance(chain, *options.reference, horizon, options.trend);
        r.delta = self_confidence(*options.reference, horizon);
        r.typesymmetry = typesymmetry_constant(*options.reference, horizon);
        r.hypotheses_hold =
            dist.trend == Trend::bounded && r.delta > 0.0 && std::isfinite(r.typesymmetry);
        note << "reference chain: l1 distance " << to_string(dist.trend) << ", ";
    } else {
        r.delta = self_confidence(chain, horizon);
        r.typesymmetry = typesymmetry_constant(chain, horizon);
        r.hypotheses_hold = r.delta > 0.0 && std::isfinite(r.typesymmetry);
    }
    note << "self-confidence delta = " << r.delta << ", type-symmetry M = " << r.typesymmetry;
    r.hypothesis_note = note.str();

    if (r.hypotheses_hold) {
        r.predicted = Prediction::class_ergodic;
    } else {
        r.findings.push_back("hypotheses not met; the theorem is silent");
    }

    attach_islands(r, chain, horizon, options);
    r.observed = observe_limits(chain, horizon, options, &r.observed_verdict);
    compare(r, multiple_consensus_observed, Prediction::class_ergodic);
    compare_islands(r);
    return r;
}

}  // namespace ergo
