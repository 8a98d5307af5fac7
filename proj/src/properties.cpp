#include "ergochain/properties.hpp"

#include "ergochain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace ergo {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

void check_horizon(const Chain& chain, std::size_t horizon) {
    if (horizon == 0) throw InvalidParameter("horizon must be at least 1");
    if (horizon > chain.length()) {
        std::ostringstream os;
        os << "horizon " << horizon << " exceeds realized chain length " << chain.length();
        throw IndexOutOfRange(os.str());
    }
}

void check_agent_set_size(std::size_t s) {
    if (s > kMaxAgentSetSize) throw SizeLimitExceeded(s, kMaxAgentSetSize);
}

/// Running maximum of lhs/rhs with 0/0 skipped and x/0 mapped to +inf.
class RatioMax {
public:
    void add(double lhs, double rhs) {
        if (lhs <= 0.0) return;
        value_ = rhs <= 0.0 ? kInfinity : std::max(value_, lhs / rhs);
    }
    bool saturated() const { return std::isinf(value_); }
    /// Unconstrained (vacuous) families report M = 1.
    double value() const { return std::max(value_, 1.0); }

private:
    double value_ = 0.0;
};

/// sum_{i in rows} sum_{j in cols} a_ij
double block_sum(const StochasticMatrix& a, AgentSet rows, AgentSet cols) {
    double total = 0.0;
    for (std::uint64_t r = rows.bits(); r != 0; r &= r - 1) {
        const auto i = static_cast<std::size_t>(std::countr_zero(r));
        for (std::uint64_t c = cols.bits(); c != 0; c &= c - 1) {
            total += a(i, static_cast<std::size_t>(std::countr_zero(c)));
        }
    }
    return total;
}

/// table[mask * s + i] = sum_{j in mask} a_ij, for every mask over s agents.
std::vector<double> row_subset_sums(const StochasticMatrix& a) {
    const std::size_t s = a.size();
    const std::size_t masks = std::size_t{1} << s;
    std::vector<double> table(masks * s, 0.0);
    for (std::size_t mask = 1; mask < masks; ++mask) {
        const auto low = static_cast<std::size_t>(std::countr_zero(mask));
        const std::size_t prev = mask & (mask - 1);
        for (std::size_t i = 0; i < s; ++i) {
            table[mask * s + i] = table[prev * s + i] + a(i, low);
        }
    }
    return table;
}

/// Visits each distinct run of identical consecutive matrices once.
template <class Fn>
void for_each_distinct(const Chain& chain, std::size_t horizon, Fn&& fn) {
    const auto ms = chain.matrices();
    for (std::size_t m = 0; m < horizon; ++m) {
        if (m > 0 && ms[m] == ms[m - 1]) continue;
        if (!fn(ms[m])) return;
    }
}

FlowSeries finish(std::vector<double> sums, const TrendPolicy& policy) {
    FlowSeries out;
    out.trend = classify_trend(sums, policy);
    out.partial_sums = std::move(sums);
    return out;
}

}  // namespace

double self_confidence(const Chain& chain, std::size_t horizon) {
    check_horizon(chain, horizon);
    double delta = 1.0;
    for_each_distinct(chain, horizon, [&](const StochasticMatrix& a) {
        delta = std::min(delta, a.entries().diagonal().minCoeff());
        return true;
    });
    return delta;
}

double subsymmetry_constant(const Chain& chain, std::size_t horizon) {
    check_horizon(chain, horizon);
    const std::size_t s = chain.agents();
    RatioMax m;
    for_each_distinct(chain, horizon, [&](const StochasticMatrix& a) {
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = 0; j < s; ++j) {
                if (i != j) m.add(a(i, j), a(j, i));
            }
        }
        return !m.saturated();
    });
    return m.value();
}

double typesymmetry_constant(const Chain& chain, std::size_t horizon) {
    check_horizon(chain, horizon);
    const std::size_t s = chain.agents();
    require_exhaustive_size(s);
    const std::size_t full = (std::size_t{1} << s) - 1;
    RatioMax m;
    for_each_distinct(chain, horizon, [&](const StochasticMatrix& a) {
        const auto table = row_subset_sums(a);
        for (std::size_t t = 1; t < full; ++t) {
            const std::size_t tc = full & ~t;
            double out = 0.0;
            double in = 0.0;
            for (std::size_t i = 0; i < s; ++i) {
                if ((t >> i) & 1U) {
                    out += table[tc * s + i];
                } else {
                    in += table[t * s + i];
                }
            }
            m.add(out, in);
        }
        return !m.saturated();
    });
    return m.value();
}

double balanced_asymmetry_constant(const Chain& chain, std::size_t horizon) {
    check_horizon(chain, horizon);
    const std::size_t s = chain.agents();
    require_exhaustive_size(s);
    const AgentSet everyone = AgentSet::all(s);
    // |S1| = |S2| = s forces S1 = S2 = S, where both sides vanish.
    std::vector<std::vector<AgentSet>> by_size(s);
    for (std::size_t c = 1; c < s; ++c) by_size[c] = subsets_of_size(everyone, c);

    RatioMax m;
    for_each_distinct(chain, horizon, [&](const StochasticMatrix& a) {
        const auto table = row_subset_sums(a);
        for (std::size_t c = 1; c < s; ++c) {
            for (AgentSet s2 : by_size[c]) {
                const std::size_t in_cols = s2.bits();
                const std::size_t out_cols = s2.complement(everyone).bits();
                for (AgentSet s1 : by_size[c]) {
                    double lhs = 0.0;
                    double rhs = 0.0;
                    for (std::size_t i = 0; i < s; ++i) {
                        if (s1.contains(i)) {
                            lhs += table[out_cols * s + i];
                        } else {
                            rhs += table[in_cols * s + i];
                        }
                    }
                    m.add(lhs, rhs);
                }
            }
        }
        return !m.saturated();
    });
    return m.value();
}

FlowSeries l1_distance(const Chain& a, const Chain& b, std::size_t horizon,
                       const TrendPolicy& policy) {
    if (a.agents() != b.agents()) {
        std::ostringstream os;
        os << "chains have " << a.agents() << " and " << b.agents() << " agents";
        throw DimensionMismatch(os.str());
    }
    check_horizon(a, horizon);
    check_horizon(b, horizon);
    std::vector<double> sums(horizon);
    double running = 0.0;
    for (std::size_t m = 0; m < horizon; ++m) {
        running += (a.matrices()[m].entries() - b.matrices()[m].entries()).cwiseAbs().maxCoeff();
        sums[m] = running;
    }
    return finish(std::move(sums), policy);
}

FlowSeries infinite_flow_series(const Chain& chain, AgentSet cut, std::size_t horizon,
                                bool one_sided, const TrendPolicy& policy) {
    check_horizon(chain, horizon);
    const std::size_t s = chain.agents();
    check_agent_set_size(s);
    const AgentSet everyone = AgentSet::all(s);
    if (cut.empty() || cut == everyone || !cut.subset_of(everyone)) {
        throw EmptyOrFullSubset("cut " + cut.to_string() + " must be a proper nonempty subset");
    }
    const AgentSet rest = cut.complement(everyone);
    std::vector<double> sums(horizon);
    double running = 0.0;
    for (std::size_t m = 0; m < horizon; ++m) {
        const auto& a = chain.matrices()[m];
        double term = block_sum(a, rest, cut);
        if (!one_sided) term += block_sum(a, cut, rest);
        running += term;
        sums[m] = running;
    }
    FlowSeries out = finish(std::move(sums), policy);
    out.cut = cut;
    out.witness = {cut};
    return out;
}

FlowSeries absolute_flow_series(const Chain& chain, std::span<const AgentSet> subsets,
                                std::size_t horizon, bool one_sided, const TrendPolicy& policy) {
    check_horizon(chain, horizon);
    const std::size_t s = chain.agents();
    check_agent_set_size(s);
    if (subsets.size() < horizon + 1) {
        std::ostringstream os;
        os << "need " << horizon + 1 << " subsets T(0..N), got " << subsets.size();
        throw CardinalityMismatch(os.str());
    }
    const AgentSet everyone = AgentSet::all(s);
    const std::size_t c = subsets.front().count();
    for (std::size_t n = 0; n <= horizon; ++n) {
        if (subsets[n].count() != c || !subsets[n].subset_of(everyone)) {
            std::ostringstream os;
            os << "T(" << n << ") = " << subsets[n].to_string() << " does not have cardinality "
               << c;
            throw CardinalityMismatch(os.str());
        }
    }
    std::vector<double> sums(horizon);
    double running = 0.0;
    for (std::size_t m = 0; m < horizon; ++m) {
        const auto& a = chain.matrices()[m];
        const AgentSet now = subsets[m];
        const AgentSet next = subsets[m + 1];
        double term = block_sum(a, next.complement(everyone), now);
        if (!one_sided) term += block_sum(a, next, now.complement(everyone));
        running += term;
        sums[m] = running;
    }
    FlowSeries out = finish(std::move(sums), policy);
    out.witness.assign(subsets.begin(), subsets.begin() + static_cast<std::ptrdiff_t>(horizon + 1));
    return out;
}

FlowSeries absolute_flow_worst_case(const Chain& chain, std::size_t cardinality,
                                    std::size_t horizon, bool one_sided,
                                    const TrendPolicy& policy,
                                    std::optional<AgentSet> universe) {
    check_horizon(chain, horizon);
    const std::size_t s = chain.agents();
    check_agent_set_size(s);
    const AgentSet everyone = AgentSet::all(s);
    const AgentSet u = universe.value_or(everyone);
    if (!u.subset_of(everyone)) throw InvalidParameter("universe " + u.to_string() + " exceeds agents");
    require_exhaustive_size(u.count());
    if (cardinality == 0 || cardinality >= u.count()) {
        std::ostringstream os;
        os << "cardinality " << cardinality << " must lie in [1, " << u.count() << ")";
        throw InvalidParameter(os.str());
    }

    const std::vector<AgentSet> states = subsets_of_size(u, cardinality);
    const std::size_t k = states.size();
    const auto members = u.members();

    std::vector<double> value(k, 0.0);
    std::vector<double> next(k);
    // Row sums of each state's columns and its complement's, per member row.
    std::vector<double> into_state(k * members.size());
    std::vector<double> into_rest(k * members.size());
    std::vector<std::uint32_t> parent(horizon * k);
    std::vector<double> sums(horizon);

    for (std::size_t m = 0; m < horizon; ++m) {
        const auto& a = chain.matrices()[m];
        for (std::size_t t = 0; t < k; ++t) {
            for (std::size_t r = 0; r < members.size(); ++r) {
                double in_t = 0.0;
                double in_rest = 0.0;
                for (std::size_t j : members) {
                    (states[t].contains(j) ? in_t : in_rest) += a(members[r], j);
                }
                into_state[t * members.size() + r] = in_t;
                into_rest[t * members.size() + r] = in_rest;
            }
        }
        double best_total = kInfinity;
        for (std::size_t t1 = 0; t1 < k; ++t1) {
            double best = kInfinity;
            std::uint32_t arg = 0;
            for (std::size_t t0 = 0; t0 < k; ++t0) {
                double cost = 0.0;
                for (std::size_t r = 0; r < members.size(); ++r) {
                    if (states[t1].contains(members[r])) {
                        if (!one_sided) cost += into_rest[t0 * members.size() + r];
                    } else {
                        cost += into_state[t0 * members.size() + r];
                    }
                }
                const double total = value[t0] + cost;
                if (total < best) {
                    best = total;
                    arg = static_cast<std::uint32_t>(t0);
                }
            }
            next[t1] = best;
            parent[m * k + t1] = arg;
            best_total = std::min(best_total, best);
        }
        value.swap(next);
        sums[m] = best_total;
    }

    std::size_t last = static_cast<std::size_t>(
        std::distance(value.begin(), std::min_element(value.begin(), value.end())));
    std::vector<AgentSet> witness(horizon + 1);
    witness[horizon] = states[last];
    for (std::size_t m = horizon; m-- > 0;) {
        last = parent[m * k + last];
        witness[m] = states[last];
    }

    FlowSeries out = finish(std::move(sums), policy);
    out.witness = std::move(witness);
    return out;
}

PropertyReport compute_properties(const Chain& chain, std::size_t horizon) {
    PropertyReport report;
    report.horizon = horizon;
    report.delta = self_confidence(chain, horizon);
    report.m_subsym = subsymmetry_constant(chain, horizon);
    const auto finite = [](double m) { return std::isfinite(m) ? Verdict::holds : Verdict::fails; };
    report.verdicts["self-confidence"] = report.delta > 0.0 ? Verdict::holds : Verdict::fails;
    report.verdicts["sub-symmetry"] = finite(report.m_subsym);
    if (chain.agents() <= kMaxExhaustiveAgents) {
        report.m_typesym = typesymmetry_constant(chain, horizon);
        report.m_balanced = balanced_asymmetry_constant(chain, horizon);
        report.verdicts["type-symmetry"] = finite(report.m_typesym);
        report.verdicts["balanced-asymmetry"] = finite(report.m_balanced);
    } else {
        report.verdicts["type-symmetry"] = Verdict::inconclusive;
        report.verdicts["balanced-asymmetry"] = Verdict::inconclusive;
    }
    return report;
}

}  // namespace ergo
