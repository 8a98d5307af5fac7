#include "ergochain/models.hpp"

#include "ergochain/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ergo {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void check_agent(std::size_t i, std::size_t agents) {
    if (i >= agents) {
        std::ostringstream os;
        os << "agent " << i << " out of range for " << agents << " agents";
        throw IndexOutOfRange(os.str());
    }
}

/// Uniform double in [0, 1) from the top 53 bits; portable across standard
/// libraries, unlike std::uniform_real_distribution.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

NeighborGraph::NeighborGraph(std::size_t agents) : agents_(agents), adj_(agents * agents, 0) {
    if (agents == 0) throw InvalidParameter("neighbor graph needs at least one agent");
}

NeighborGraph NeighborGraph::from_edges(std::size_t agents,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    NeighborGraph g(agents);
    for (auto [i, j] : edges) {
        g.link(i, j);
        g.link(j, i);
    }
    return g;
}

NeighborGraph NeighborGraph::from_neighbor_sets(const std::vector<std::vector<std::size_t>>& sets) {
    NeighborGraph g(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (auto j : sets[i]) g.link(i, j);
    }
    return g;
}

NeighborGraph NeighborGraph::complete(std::size_t agents) {
    NeighborGraph g(agents);
    for (std::size_t i = 0; i < agents; ++i) {
        for (std::size_t j = 0; j < agents; ++j) {
            if (i != j) g.link(i, j);
        }
    }
    return g;
}

NeighborGraph NeighborGraph::path(std::size_t agents) {
    NeighborGraph g(agents);
    for (std::size_t i = 0; i + 1 < agents; ++i) {
        g.link(i, i + 1);
        g.link(i + 1, i);
    }
    return g;
}

NeighborGraph NeighborGraph::groups(std::size_t agents,
                                    const std::vector<std::vector<std::size_t>>& groups) {
    NeighborGraph g(agents);
    for (const auto& group : groups) {
        for (auto i : group) {
            for (auto j : group) {
                if (i != j) g.link(i, j);
            }
        }
    }
    return g;
}

std::size_t NeighborGraph::degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < agents_; ++j) d += linked(i, j) ? 1 : 0;
    return d;
}

void NeighborGraph::link(std::size_t i, std::size_t j) {
    check_agent(i, agents_);
    check_agent(j, agents_);
    if (i == j) throw InvalidParameter("an agent is not its own neighbor");
    adj_[i * agents_ + j] = 1;
}

JlmSchedule::JlmSchedule(std::vector<NeighborGraph> graphs, Mode mode)
    : graphs_(std::move(graphs)), mode_(mode) {
    if (graphs_.empty()) throw InvalidParameter("schedule needs at least one graph");
    for (const auto& g : graphs_) {
        if (g.agents() != graphs_.front().agents()) {
            throw DimensionMismatch("schedule graphs disagree on the number of agents");
        }
    }
}

JlmSchedule JlmSchedule::fixed(NeighborGraph g) {
    return JlmSchedule({std::move(g)}, Mode::periodic);
}

JlmSchedule JlmSchedule::explicit_steps(std::vector<NeighborGraph> graphs) {
    return JlmSchedule(std::move(graphs), Mode::explicit_list);
}

JlmSchedule JlmSchedule::periodic(std::vector<NeighborGraph> graphs) {
    return JlmSchedule(std::move(graphs), Mode::periodic);
}

JlmSchedule JlmSchedule::random(std::size_t agents, double p, std::size_t horizon,
                                std::uint64_t seed,
                                const std::optional<std::vector<std::vector<std::size_t>>>& groups) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("link probability must lie in [0, 1]");
    if (horizon == 0) throw InvalidParameter("random schedule needs a positive horizon");
    const NeighborGraph allowed =
        groups ? NeighborGraph::groups(agents, *groups) : NeighborGraph::complete(agents);
    std::mt19937_64 rng(seed);
    std::vector<NeighborGraph> graphs;
    graphs.reserve(horizon);
    for (std::size_t n = 0; n < horizon; ++n) {
        NeighborGraph g(agents);
        for (std::size_t i = 0; i < agents; ++i) {
            for (std::size_t j = i + 1; j < agents; ++j) {
                if (allowed.linked(i, j) && unit_draw(rng) < p) {
                    g.link(i, j);
                    g.link(j, i);
                }
            }
        }
        graphs.push_back(std::move(g));
    }
    return JlmSchedule(std::move(graphs), Mode::explicit_list);
}

const NeighborGraph& JlmSchedule::at(std::size_t n) const {
    if (mode_ == Mode::periodic) return graphs_[n % graphs_.size()];
    if (n >= graphs_.size()) {
        std::ostringstream os;
        os << "schedule defines " << graphs_.size() << " steps, step " << n << " requested";
        throw IndexOutOfRange(os.str());
    }
    return graphs_[n];
}

StochasticMatrix jlm_matrix(const JlmSchedule& schedule, std::size_t n) {
    const NeighborGraph& g = schedule.at(n);
    const std::size_t s = g.agents();
    Matrix a = Matrix::Zero(idx(s), idx(s));
    for (std::size_t i = 0; i < s; ++i) {
        const double w = 1.0 / (1.0 + static_cast<double>(g.degree(i)));
        a(idx(i), idx(i)) = w;
        for (std::size_t j = 0; j < s; ++j) {
            if (!g.linked(i, j)) continue;
            if (!g.linked(j, i)) throw AsymmetricNeighborSet(i, j, n);
            a(idx(i), idx(j)) = w;
        }
    }
    return validate_matrix(a);
}

Chain jlm_chain(const JlmSchedule& schedule, std::size_t horizon) {
    return Chain::generate(schedule.agents(), horizon,
                           [&](std::size_t n) { return jlm_matrix(schedule, n); });
}

FiniteRangeSpec::FiniteRangeSpec(Kernel shared) : FiniteRangeSpec(std::vector<Kernel>{std::move(shared)}) {}

FiniteRangeSpec::FiniteRangeSpec(std::vector<Kernel> per_agent) : kernels_(std::move(per_agent)) {
    if (kernels_.empty()) throw InvalidParameter("finite-range model needs a kernel");
    for (const auto& k : kernels_) {
        if (!(k.at_zero() > 0.0)) throw InvalidParameter("kernel " + k.name() + " must be positive at 0");
        if (!std::isfinite(k.support())) {
            throw InvalidParameter("kernel " + k.name() + " has no finite interaction range");
        }
    }
}

FiniteRangeSpec FiniteRangeSpec::krause(double radius) {
    return FiniteRangeSpec(Kernel::indicator(radius));
}

const Kernel& FiniteRangeSpec::kernel_for(std::size_t agent) const {
    if (kernels_.size() == 1) return kernels_.front();
    check_agent(agent, kernels_.size());
    return kernels_[agent];
}

StochasticMatrix finite_range_matrix(const FiniteRangeSpec& spec, const StateVector& x) {
    const std::size_t s = x.agents();
    if (spec.per_agent() && spec.kernel_count() != s) {
        std::ostringstream os;
        os << spec.kernel_count() << " per-agent kernels for " << s << " agents";
        throw DimensionMismatch(os.str());
    }
    const Matrix& v = x.values();
    Matrix a(idx(s), idx(s));
    for (std::size_t i = 0; i < s; ++i) {
        const Kernel& f = spec.kernel_for(i);
        double total = 0.0;
        for (std::size_t j = 0; j < s; ++j) {
            const double w = f((v.row(idx(i)) - v.row(idx(j))).norm());
            a(idx(i), idx(j)) = w;
            total += w;
        }
        a.row(idx(i)) /= total;
    }
    return validate_matrix(a);
}

Generator finite_range_generator(FiniteRangeSpec spec) {
    return [spec = std::move(spec)](const StateVector& x, std::size_t) {
        return finite_range_matrix(spec, x);
    };
}

CsSpec::CsSpec(Kernel k, double step) : kernel(std::move(k)), h(step) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidParameter("time step h must be positive");
}

CsState::CsState(Positions x, Positions v, std::size_t n)
    : positions(std::move(x)), velocities(std::move(v)), time_index(n) {
    if (positions.rows() != velocities.rows()) {
        throw DimensionMismatch("positions and velocities must list the same agents");
    }
    if (positions.rows() == 0) throw DimensionMismatch("flock needs at least one agent");
}

namespace {

double diameter(const Positions& p) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < p.rows(); ++j) {
            best = std::max(best, (p.row(i) - p.row(j)).norm());
        }
    }
    return best;
}

}  // namespace

double CsState::position_diameter() const { return diameter(positions); }
double CsState::velocity_diameter() const { return diameter(velocities); }

bool cs_kernel_guard(const Kernel& kernel, std::size_t agents) {
    return kernel.at_zero() < 1.0 / static_cast<double>(agents);
}

CsStepResult cs_step(const CsSpec& spec, const CsState& state) {
    const std::size_t s = state.agents();
    const auto& x = state.positions;
    Matrix a(idx(s), idx(s));
    for (std::size_t i = 0; i < s; ++i) {
        a(idx(i), idx(i)) = 0.0;
        for (std::size_t j = i + 1; j < s; ++j) {
            const double w = spec.kernel((x.row(idx(i)) - x.row(idx(j))).norm());
            a(idx(i), idx(j)) = w;
            a(idx(j), idx(i)) = w;
        }
    }
    std::vector<SelfConfidenceWarning> warnings;
    const double floor = 1.0 / static_cast<double>(s);
    for (std::size_t i = 0; i < s; ++i) {
        const double off = a.row(idx(i)).sum();
        const double diag = 1.0 - off;
        if (!(diag > 0.0)) throw SelfConfidenceViolated(i, state.time_index, diag);
        if (diag <= floor && s > 1) warnings.push_back({i, state.time_index, diag});
        a(idx(i), idx(i)) = diag;
    }
    StochasticMatrix rates = validate_matrix(a);
    CsState next(x + spec.h * state.velocities, rates.entries() * state.velocities,
                 state.time_index + 1);
    return {std::move(next), std::move(rates), std::move(warnings)};
}

CsRun simulate_cs(const CsSpec& spec, const CsState& initial, std::size_t horizon) {
    std::vector<CsState> states;
    std::vector<StochasticMatrix> applied;
    std::vector<SelfConfidenceWarning> warnings;
    states.reserve(horizon + 1);
    applied.reserve(horizon);
    states.push_back(initial);
    for (std::size_t m = 0; m < horizon; ++m) {
        auto result = cs_step(spec, states.back());
        warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());
        applied.push_back(std::move(result.rates));
        states.push_back(std::move(result.next));
    }
    return {std::move(states), Chain(initial.agents(), std::move(applied), initial.time_index),
            std::move(warnings)};
}

}  // namespace ergo
