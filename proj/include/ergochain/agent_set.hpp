#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace ergo {

/// Largest agent count for which subsets are enumerated exhaustively.
inline constexpr std::size_t kMaxExhaustiveAgents = 12;
/// Largest agent count an AgentSet can describe at all.
inline constexpr std::size_t kMaxAgentSetSize = 64;

/// A subset of agents {0, ..., s-1}, stored as a bitmask.
class AgentSet {
public:
    constexpr AgentSet() = default;
    constexpr explicit AgentSet(std::uint64_t bits) : bits_(bits) {}
    AgentSet(std::initializer_list<std::size_t> members);
    static AgentSet of(const std::vector<std::size_t>& members);
    static constexpr AgentSet all(std::size_t s) {
        return AgentSet(s >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << s) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
    constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool empty() const { return bits_ == 0; }

    /// Complement within `universe`.
    constexpr AgentSet complement(AgentSet universe) const { return AgentSet(universe.bits_ & ~bits_); }
    constexpr bool subset_of(AgentSet other) const { return (bits_ & ~other.bits_) == 0; }

    std::vector<std::size_t> members() const;
    /// "{1,3,4}" with 1-based agent ids.
    std::string to_string() const;

    friend constexpr bool operator==(AgentSet, AgentSet) = default;
    friend constexpr auto operator<=>(AgentSet, AgentSet) = default;

private:
    std::uint64_t bits_ = 0;
};

/// Every subset of `universe` with exactly `cardinality` members, ascending by mask.
std::vector<AgentSet> subsets_of_size(AgentSet universe, std::size_t cardinality);

/// Throws SizeLimitExceeded when s > kMaxExhaustiveAgents.
void require_exhaustive_size(std::size_t s);

}  // namespace ergo
