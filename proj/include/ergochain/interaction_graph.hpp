#pragma once

#include "ergochain/agent_set.hpp"
#include "ergochain/chain.hpp"
#include "ergochain/trend.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace ergo {

/// Cumulative rates int(i,j) = sum_{n < horizon} a_ij(n), plus the increment
/// accumulated over the trailing trend window.
struct InteractionTotals {
    Matrix totals;
    Matrix tail;
    std::size_t horizon = 0;
    std::size_t window = 0;

    std::size_t agents() const { return static_cast<std::size_t>(totals.rows()); }
};

InteractionTotals accumulate_interactions(const Chain& chain, std::size_t horizon,
                                          const TrendPolicy& policy = {});

struct InteractionEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;  // int(from, to) at the horizon
};

/// Edge i -> j iff the pair's cumulative rate has a divergent trend.
/// Self-loops are kept.
struct StrongInteractionDigraph {
    std::size_t agents = 0;
    std::vector<InteractionEdge> edges;  // sorted by (from, to)

    bool has_edge(std::size_t from, std::size_t to) const;
    std::vector<std::vector<std::size_t>> successors() const;
};

StrongInteractionDigraph build_digraph(const InteractionTotals& totals,
                                       const TrendPolicy& policy = {});

/// "# from to weight trend" header, then one line per edge with 1-based ids.
std::string to_edge_list(const StrongInteractionDigraph& g);

struct IslandPartition {
    /// Strongly connected components, members ascending, classes ordered by
    /// their smallest member.
    std::vector<std::vector<std::size_t>> classes;
    /// True when no edge joins two different classes, i.e. reachability is
    /// symmetric and the classes are exactly the reachability classes.
    bool reachability_symmetric = true;

    std::size_t class_of(std::size_t agent) const;
    std::vector<AgentSet> as_sets() const;
};

IslandPartition islands(const StrongInteractionDigraph& g);

/// Order-independent equality of two partitions.
bool same_partition(const std::vector<std::vector<std::size_t>>& a,
                    const std::vector<std::vector<std::size_t>>& b);

}  // namespace ergo
