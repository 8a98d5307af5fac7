#include "ergochain/interaction_graph.hpp"

#include "ergochain/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace ergo {

InteractionTotals accumulate_interactions(const Chain& chain, std::size_t horizon,
                                          const TrendPolicy& policy) {
    if (horizon == 0) throw InvalidParameter("horizon must be at least 1");
    if (horizon > chain.length()) {
        std::ostringstream os;
        os << "horizon " << horizon << " exceeds realized chain length " << chain.length();
        throw IndexOutOfRange(os.str());
    }
    const auto s = static_cast<Eigen::Index>(chain.agents());
    InteractionTotals out;
    out.horizon = horizon;
    out.window = policy.window(horizon);
    out.totals = Matrix::Zero(s, s);
    Matrix before_window = Matrix::Zero(s, s);
    const std::size_t window_start = horizon - out.window;
    for (std::size_t m = 0; m < horizon; ++m) {
        if (m == window_start) before_window = out.totals;
        out.totals += chain.matrices()[m].entries();
    }
    out.tail = out.totals - before_window;
    return out;
}

bool StrongInteractionDigraph::has_edge(std::size_t from, std::size_t to) const {
    return std::binary_search(edges.begin(), edges.end(), InteractionEdge{from, to, 0.0},
                              [](const InteractionEdge& a, const InteractionEdge& b) {
                                  return std::pair(a.from, a.to) < std::pair(b.from, b.to);
                              });
}

std::vector<std::vector<std::size_t>> StrongInteractionDigraph::successors() const {
    std::vector<std::vector<std::size_t>> out(agents);
    for (const auto& e : edges) out[e.from].push_back(e.to);
    return out;
}

StrongInteractionDigraph build_digraph(const InteractionTotals& totals, const TrendPolicy& policy) {
    StrongInteractionDigraph g;
    g.agents = totals.agents();
    for (std::size_t i = 0; i < g.agents; ++i) {
        for (std::size_t j = 0; j < g.agents; ++j) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto jj = static_cast<Eigen::Index>(j);
            if (policy.classify(totals.tail(ii, jj), totals.window) == Trend::divergent) {
                g.edges.push_back({i, j, totals.totals(ii, jj)});
            }
        }
    }
    return g;
}

std::string to_edge_list(const StrongInteractionDigraph& g) {
    std::string out = "# from to weight trend\n";
    char buf[96];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g divergent-trend\n", e.from + 1, e.to + 1,
                      e.weight);
        out += buf;
    }
    return out;
}

std::size_t IslandPartition::class_of(std::size_t agent) const {
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (std::binary_search(classes[c].begin(), classes[c].end(), agent)) return c;
    }
    throw IndexOutOfRange("agent " + std::to_string(agent) + " not in any island");
}

std::vector<AgentSet> IslandPartition::as_sets() const {
    std::vector<AgentSet> out;
    out.reserve(classes.size());
    for (const auto& c : classes) out.push_back(AgentSet::of(c));
    return out;
}

IslandPartition islands(const StrongInteractionDigraph& g) {
    const std::size_t n = g.agents;
    const auto succ = g.successors();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited);
    std::vector<std::size_t> low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> component(n, 0);
    std::vector<std::vector<std::size_t>> classes;
    std::size_t counter = 0;

    // Iterative Tarjan: frames hold (vertex, next successor position).
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < succ[v].size()) {
                const std::size_t w = succ[v][pos++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) {
                const std::size_t parent = frames.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
            if (low[done] == index[done]) {
                std::vector<std::size_t> members;
                std::size_t w = 0;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    members.push_back(w);
                } while (w != done);
                std::sort(members.begin(), members.end());
                classes.push_back(std::move(members));
            }
        }
    }
    std::sort(classes.begin(), classes.end());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (auto a : classes[c]) component[a] = c;
    }

    IslandPartition out;
    out.classes = std::move(classes);
    for (const auto& e : g.edges) {
        if (component[e.from] != component[e.to]) {
            out.reachability_symmetric = false;
            break;
        }
    }
    return out;
}

bool same_partition(const std::vector<std::vector<std::size_t>>& a,
                    const std::vector<std::vector<std::size_t>>& b) {
    auto normalize = [](std::vector<std::vector<std::size_t>> p) {
        for (auto& c : p) std::sort(c.begin(), c.end());
        std::sort(p.begin(), p.end());
        return p;
    };
    return normalize(a) == normalize(b);
}

}  // namespace ergo
