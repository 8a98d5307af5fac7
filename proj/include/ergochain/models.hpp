#pragma once

#include "ergochain/chain.hpp"
#include "ergochain/kernel.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace ergo {

// --- JLM heading-averaging model -------------------------------------------

/// Neighbor sets D_i at one instant, as a dense s x s relation (no self-loops).
class NeighborGraph {
public:
    explicit NeighborGraph(std::size_t agents);
    /// Undirected edges; each pair is inserted both ways.
    static NeighborGraph from_edges(std::size_t agents,
                                    const std::vector<std::pair<std::size_t, std::size_t>>& edges);
    /// Raw neighbor lists D_i, symmetric or not.
    static NeighborGraph from_neighbor_sets(const std::vector<std::vector<std::size_t>>& sets);
    static NeighborGraph complete(std::size_t agents);
    static NeighborGraph path(std::size_t agents);
    /// Complete graph inside each group, nothing across.
    static NeighborGraph groups(std::size_t agents, const std::vector<std::vector<std::size_t>>& groups);

    std::size_t agents() const { return agents_; }
    bool linked(std::size_t i, std::size_t j) const { return adj_[i * agents_ + j] != 0; }
    std::size_t degree(std::size_t i) const;
    void link(std::size_t i, std::size_t j);

private:
    std::size_t agents_;
    std::vector<char> adj_;
};

/// D_i(n) for every step: a fixed graph, an explicit finite list, a periodic
/// pattern, or a seeded random process materialized at construction.
class JlmSchedule {
public:
    static JlmSchedule fixed(NeighborGraph g);
    /// Step n uses graphs[n]; indices past the end are out of range.
    static JlmSchedule explicit_steps(std::vector<NeighborGraph> graphs);
    /// Step n uses graphs[n mod size].
    static JlmSchedule periodic(std::vector<NeighborGraph> graphs);
    /// Each allowed pair is linked independently with probability p at every
    /// step n < horizon. Without `groups` every pair is allowed; with it only
    /// pairs inside a group.
    static JlmSchedule random(std::size_t agents, double p, std::size_t horizon, std::uint64_t seed,
                              const std::optional<std::vector<std::vector<std::size_t>>>& groups = {});

    std::size_t agents() const { return graphs_.front().agents(); }
    const NeighborGraph& at(std::size_t n) const;

private:
    enum class Mode { explicit_list, periodic };
    JlmSchedule(std::vector<NeighborGraph> graphs, Mode mode);

    std::vector<NeighborGraph> graphs_;
    Mode mode_;
};

/// a_ii = a_ij = 1/(1 + d_i(n)) for j in D_i(n), zero elsewhere.
/// Throws AsymmetricNeighborSet when j in D_i(n) but i notin D_j(n).
StochasticMatrix jlm_matrix(const JlmSchedule& schedule, std::size_t n);
Chain jlm_chain(const JlmSchedule& schedule, std::size_t horizon);

// --- Finite-range (Krause-type) model ---------------------------------------

/// Per-agent kernels f_i vanishing at R_i (one shared kernel is allowed).
class FiniteRangeSpec {
public:
    explicit FiniteRangeSpec(Kernel shared);
    explicit FiniteRangeSpec(std::vector<Kernel> per_agent);
    /// Indicator kernel of radius R for everyone.
    static FiniteRangeSpec krause(double radius);

    const Kernel& kernel_for(std::size_t agent) const;
    bool per_agent() const { return kernels_.size() > 1; }
    std::size_t kernel_count() const { return kernels_.size(); }

private:
    std::vector<Kernel> kernels_;
};

/// a_ij = f_i(|X_i - X_j|) / sum_k f_i(|X_i - X_k|), Euclidean distance over
/// the state coordinates (absolute value for scalar states).
StochasticMatrix finite_range_matrix(const FiniteRangeSpec& spec, const StateVector& x);
Generator finite_range_generator(FiniteRangeSpec spec);

// --- Generalized Cucker-Smale model ------------------------------------------

using Positions = Eigen::Matrix<double, Eigen::Dynamic, 3>;

struct CsSpec {
    Kernel kernel;
    double h = 0.0;  // time step

    CsSpec(Kernel k, double step);
};

struct CsState {
    Positions positions;
    Positions velocities;
    std::size_t time_index = 0;

    CsState(Positions x, Positions v, std::size_t n = 0);
    std::size_t agents() const { return static_cast<std::size_t>(positions.rows()); }
    /// max_{i<j} |X_i - X_j|, Euclidean.
    double position_diameter() const;
    /// max_{i<j} |V_i - V_j|, Euclidean.
    double velocity_diameter() const;
};

/// Realized self weight in (0, 1/s]: the chain stays stochastic but loses the
/// 1/s self-confidence margin.
struct SelfConfidenceWarning {
    std::size_t agent = 0;
    std::size_t step = 0;
    double diagonal = 0.0;
};

struct CsStepResult {
    CsState next;
    StochasticMatrix rates;
    std::vector<SelfConfidenceWarning> warnings;
};

/// X_i(n+1) = X_i(n) + h V_i(n), V(n+1) = A_n V(n) with
/// a_ij = f(|X_i - X_j|) (i != j) and a_ii = 1 - sum_{j != i} a_ij.
/// Throws SelfConfidenceViolated when some a_ii <= 0.
CsStepResult cs_step(const CsSpec& spec, const CsState& state);

/// f(0) < 1/s, i.e. sup f stays below 1/s.
bool cs_kernel_guard(const Kernel& kernel, std::size_t agents);

struct CsRun {
    std::vector<CsState> states;  // x(0) ... x(N)
    Chain realized;
    std::vector<SelfConfidenceWarning> warnings;
};

CsRun simulate_cs(const CsSpec& spec, const CsState& initial, std::size_t horizon);

}  // namespace ergo
