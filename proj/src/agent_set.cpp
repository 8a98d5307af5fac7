#include "ergochain/agent_set.hpp"

#include "ergochain/errors.hpp"

#include <algorithm>

namespace ergo {

AgentSet::AgentSet(std::initializer_list<std::size_t> members) {
    for (auto i : members) {
        if (i >= kMaxAgentSetSize) throw SizeLimitExceeded(i + 1, kMaxAgentSetSize);
        bits_ |= std::uint64_t{1} << i;
    }
}

AgentSet AgentSet::of(const std::vector<std::size_t>& members) {
    std::uint64_t bits = 0;
    for (auto i : members) {
        if (i >= kMaxAgentSetSize) throw SizeLimitExceeded(i + 1, kMaxAgentSetSize);
        bits |= std::uint64_t{1} << i;
    }
    return AgentSet(bits);
}

std::vector<std::size_t> AgentSet::members() const {
    std::vector<std::size_t> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    }
    return out;
}

std::string AgentSet::to_string() const {
    std::string out = "{";
    bool first = true;
    for (auto i : members()) {
        if (!first) out += ',';
        out += std::to_string(i + 1);
        first = false;
    }
    return out + "}";
}

std::vector<AgentSet> subsets_of_size(AgentSet universe, std::size_t cardinality) {
    const auto elems = universe.members();
    std::vector<AgentSet> out;
    if (cardinality > elems.size()) return out;
    // Walk compact masks over the universe's members, then scatter.
    const std::size_t n = elems.size();
    if (cardinality == 0) return {AgentSet()};
    std::uint64_t compact = (std::uint64_t{1} << cardinality) - 1;
    const std::uint64_t limit = n >= 64 ? 0 : (std::uint64_t{1} << n);
    while (limit == 0 || compact < limit) {
        std::uint64_t bits = 0;
        for (std::uint64_t b = compact; b != 0; b &= b - 1) {
            bits |= std::uint64_t{1} << elems[static_cast<std::size_t>(std::countr_zero(b))];
        }
        out.emplace_back(bits);
        // Gosper's hack: next mask with the same popcount.
        const std::uint64_t c = compact & (~compact + 1);
        const std::uint64_t r = compact + c;
        if (r == 0) break;
        compact = (((r ^ compact) >> 2) / c) | r;
    }
    std::sort(out.begin(), out.end());
    return out;
}

void require_exhaustive_size(std::size_t s) {
    if (s > kMaxExhaustiveAgents) throw SizeLimitExceeded(s, kMaxExhaustiveAgents);
}

}  // namespace ergo
