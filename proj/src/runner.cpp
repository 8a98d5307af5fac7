#include "ergochain/runner.hpp"

#include "ergochain/cs_certificate.hpp"
#include "ergochain/interaction_graph.hpp"
#include "ergochain/limit_analysis.hpp"
#include "ergochain/models.hpp"
#include "ergochain/pipelines.hpp"
#include "ergochain/properties.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ergo::cli {

namespace {

using ojson = nlohmann::ordered_json;

/// JSON has no infinities; they become strings.
ojson num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

ojson agents_json(const std::vector<std::size_t>& members) {
    auto out = ojson::array();
    for (auto a : members) out.push_back(a + 1);
    return out;
}

ojson partition_json(const std::vector<std::vector<std::size_t>>& classes) {
    auto out = ojson::array();
    for (const auto& c : classes) out.push_back(agents_json(c));
    return out;
}

ojson matrix_json(const Matrix& m) {
    auto out = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        auto row = ojson::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
        out.push_back(row);
    }
    return out;
}

TrendPolicy trend_policy(const Tolerances& t) {
    TrendPolicy p;
    p.window_fraction = t.window;
    p.divergence_threshold = t.divergence;
    p.bounded_threshold = t.bounded;
    return p;
}

LimitTolerances limit_tolerances(const Tolerances& t) { return {t.limit, t.leak}; }

class Stopwatch {
public:
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// --- Simulation ----------------------------------------------------------------

struct Simulation {
    Chain realized{std::vector<StochasticMatrix>{StochasticMatrix()}};
    std::vector<Matrix> states;  // agents x components, n = 0..N
    std::vector<std::string> components;
    std::optional<CsSpec> cs_spec;
    std::optional<CsRun> cs_run;
    std::optional<CsState> cs_initial;
};

NeighborGraph graph_from_edges(std::size_t s, const std::vector<Edge>& edges) {
    return NeighborGraph::from_edges(s, edges);
}

JlmSchedule jlm_schedule(const Scenario& sc) {
    const auto& c = sc.jlm;
    const std::size_t s = c.agents;
    if (c.kind == "complete") return JlmSchedule::fixed(NeighborGraph::complete(s));
    if (c.kind == "path") return JlmSchedule::fixed(NeighborGraph::path(s));
    if (c.kind == "explicit") return JlmSchedule::fixed(graph_from_edges(s, c.edges));
    if (c.kind == "groups") return JlmSchedule::fixed(NeighborGraph::groups(s, c.groups));
    if (c.kind == "periodic") {
        std::vector<NeighborGraph> graphs;
        for (const auto& step : c.steps) graphs.push_back(graph_from_edges(s, step));
        return JlmSchedule::periodic(std::move(graphs));
    }
    std::optional<std::vector<std::vector<std::size_t>>> groups;
    if (!c.groups.empty()) groups = c.groups;
    return JlmSchedule::random(s, c.probability, sc.horizon, sc.seed, groups);
}

Matrix initial_matrix(const Scenario& sc) {
    const auto rows = static_cast<Eigen::Index>(sc.initial_state.size());
    const auto cols = static_cast<Eigen::Index>(sc.initial_state.front().size());
    Matrix x(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index r = 0; r < cols; ++r) {
            x(i, r) = sc.initial_state[static_cast<std::size_t>(i)][static_cast<std::size_t>(r)];
        }
    }
    return x;
}

std::vector<std::string> scalar_components(std::size_t dims) {
    if (dims == 1) return {"x"};
    std::vector<std::string> out;
    for (std::size_t r = 0; r < dims; ++r) out.push_back("x" + std::to_string(r + 1));
    return out;
}

Positions points(const std::vector<std::array<double, 3>>& pts) {
    Positions p(static_cast<Eigen::Index>(pts.size()), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (Eigen::Index r = 0; r < 3; ++r) p(static_cast<Eigen::Index>(i), r) = pts[i][static_cast<std::size_t>(r)];
    }
    return p;
}

Simulation simulate(const Scenario& sc) {
    Simulation sim;
    const std::size_t N = sc.horizon;
    const auto take_trajectory = [&](Trajectory t) {
        sim.realized = std::move(t.realized);
        for (auto& st : t.states) sim.states.push_back(st.values());
        sim.components = scalar_components(t.states.front().dimension());
    };
    switch (sc.model) {
        case ModelKind::jlm: {
            const auto chain = jlm_chain(jlm_schedule(sc), N);
            take_trajectory(trajectory(chain, StateVector(initial_matrix(sc)), N));
            break;
        }
        case ModelKind::finite_range: {
            const auto& c = sc.finite_range;
            const auto make = [&](double r) {
                return c.kernel == "tent" ? Kernel::tent(r) : Kernel::indicator(r);
            };
            std::vector<Kernel> kernels;
            if (c.radii.empty()) {
                kernels.push_back(make(c.radius));
            } else {
                for (double r : c.radii) kernels.push_back(make(r));
            }
            const auto spec = kernels.size() == 1 ? FiniteRangeSpec(kernels.front())
                                                  : FiniteRangeSpec(std::move(kernels));
            take_trajectory(trajectory(finite_range_generator(spec), StateVector(initial_matrix(sc)), N));
            break;
        }
        case ModelKind::explicit_chain: {
            std::vector<StochasticMatrix> ms;
            for (const auto& m : sc.explicit_chain.matrices) {
                ms.push_back(validate_matrix(m, sc.tolerances.row));
            }
            const Chain chain(std::move(ms));
            take_trajectory(trajectory(chain, StateVector(initial_matrix(sc)), N));
            break;
        }
        case ModelKind::cucker_smale: {
            const auto& c = sc.cucker_smale;
            sim.cs_spec.emplace(Kernel::power_law(c.K, c.sigma, c.beta), c.h);
            sim.cs_initial.emplace(points(c.positions), points(c.velocities));
            sim.cs_run = simulate_cs(*sim.cs_spec, *sim.cs_initial, N);
            sim.realized = sim.cs_run->realized;
            sim.components = {"px", "py", "pz", "vx", "vy", "vz"};
            for (const auto& st : sim.cs_run->states) {
                Matrix m(st.positions.rows(), 6);
                m << st.positions, st.velocities;
                sim.states.push_back(std::move(m));
            }
            break;
        }
    }
    return sim;
}

double spread(const Matrix& m) { return (m.colwise().maxCoeff() - m.colwise().minCoeff()).sum(); }

ojson simulation_summary(const Scenario& sc, const Simulation& sim) {
    ojson j;
    j["agents"] = sim.states.front().rows();
    j["steps"] = sim.states.size() - 1;
    j["components"] = sim.components;
    const Matrix& last = sim.states.back();
    j["initial_spread"] = num(spread(sim.states.front()));
    j["final_spread"] = num(spread(last));
    // The last step after which no coordinate moves by 1e-12 or more.
    std::optional<std::size_t> settled;
    double last_change = 0.0;
    for (std::size_t n = sim.states.size() - 1; n > 0; --n) {
        const double change = (sim.states[n] - sim.states[n - 1]).cwiseAbs().maxCoeff();
        if (n == sim.states.size() - 1) last_change = change;
        if (change >= 1e-12) break;
        settled = n - 1;
    }
    j["last_step_change"] = num(last_change);
    j["fixed_point_step"] = settled ? ojson(*settled) : ojson(nullptr);
    j["final_state"] = matrix_json(last);
    if (sim.cs_run) {
        const auto& states = sim.cs_run->states;
        double running = 0.0;
        for (const auto& st : states) running = std::max(running, st.position_diameter());
        j["final_velocity_diameter"] = num(states.back().velocity_diameter());
        j["final_position_diameter"] = num(states.back().position_diameter());
        j["max_position_diameter"] = num(running);
        j["self_confidence_warnings"] = sim.cs_run->warnings.size();
    }
    (void)sc;
    return j;
}

void write_trajectory(const std::filesystem::path& file, const Simulation& sim, std::size_t stride) {
    std::ofstream out(file);
    out << "n,agent,component,value\n";
    char buf[64];
    const std::size_t last = sim.states.size() - 1;
    for (std::size_t n = 0; n <= last; ++n) {
        if (n % stride != 0 && n != last) continue;
        const Matrix& m = sim.states[n];
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index r = 0; r < m.cols(); ++r) {
                std::snprintf(buf, sizeof buf, "%.17g", m(i, r));
                out << n << ',' << i + 1 << ',' << sim.components[static_cast<std::size_t>(r)] << ','
                    << buf << '\n';
            }
        }
    }
}

// --- Analyses ------------------------------------------------------------------

ojson trend_policy_json(const TrendPolicy& p, std::size_t horizon) {
    ojson j;
    j["window"] = p.window(horizon);
    j["divergence_threshold"] = p.divergence_threshold;
    j["bounded_threshold"] = p.bounded_threshold;
    j["note"] = "finite-horizon tail heuristic; trends are numeric evidence, not proofs";
    return j;
}

ojson flow_json(const FlowSeries& f) {
    ojson j;
    j["trend"] = std::string(to_string(f.trend));
    j["total"] = num(f.total());
    if (!f.witness.empty()) j["witness_final"] = f.witness.back().to_string();
    return j;
}

ojson run_properties(const Chain& chain, std::size_t N, const TrendPolicy& policy) {
    const auto p = compute_properties(chain, N);
    ojson j;
    j["horizon"] = p.horizon;
    j["self_confidence"] = num(p.delta);
    j["subsymmetry_constant"] = num(p.m_subsym);
    j["typesymmetry_constant"] = num(p.m_typesym);
    j["balanced_asymmetry_constant"] = num(p.m_balanced);
    ojson verdicts;
    for (const auto& [k, v] : p.verdicts) verdicts[k] = std::string(to_string(v));
    j["verdicts"] = verdicts;
    j["trend_policy"] = trend_policy_json(policy, N);

    const std::size_t s = chain.agents();
    constexpr std::size_t kFlowAgentLimit = 8;
    if (s > kFlowAgentLimit) {
        j["absolute_flow"] = "skipped: worst-case flow summaries are limited to 8 agents here";
        return j;
    }
    auto flows = ojson::array();
    for (std::size_t c = 1; c < s; ++c) {
        ojson f;
        f["cardinality"] = c;
        f["two_sided"] = flow_json(absolute_flow_worst_case(chain, c, N, false, policy));
        f["one_sided"] = flow_json(absolute_flow_worst_case(chain, c, N, true, policy));
        flows.push_back(f);
    }
    j["absolute_flow"] = flows;
    return j;
}

ojson run_interaction_graph(const Chain& chain, std::size_t N, const TrendPolicy& policy,
                            const std::optional<std::filesystem::path>& out_dir) {
    const auto g = build_digraph(accumulate_interactions(chain, N, policy), policy);
    const auto part = islands(g);
    ojson j;
    auto edges = ojson::array();
    for (const auto& e : g.edges) {
        edges.push_back(ojson{{"from", e.from + 1}, {"to", e.to + 1}, {"weight", num(e.weight)}});
    }
    j["edges"] = edges;
    j["islands"] = partition_json(part.classes);
    j["reachability_symmetric"] = part.reachability_symmetric;
    if (!part.reachability_symmetric) {
        j["note"] = "reachability is not symmetric; islands are strongly connected components";
    }
    j["trend_policy"] = trend_policy_json(policy, N);
    if (out_dir) {
        std::ofstream(*out_dir / "digraph.txt") << to_edge_list(g);
        j["edge_list"] = "digraph.txt";
    }
    return j;
}

ojson classification_json(const LimitClassification& c) {
    ojson j;
    j["start_index"] = c.start_index;
    j["verdict"] = std::string(to_string(c.verdict));
    j["groups"] = partition_json(c.groups);
    j["stabilized"] = c.stabilized;
    j["max_group_spread"] = num(c.max_group_spread);
    j["max_leak"] = num(c.max_leak);
    auto res = ojson::array();
    for (const auto& r : c.residuals) {
        res.push_back(ojson{{"length", r.length}, {"row_spread", num(r.row_spread)}, {"change", num(r.change)}});
    }
    j["residuals"] = res;
    j["limit"] = matrix_json(c.limit.entries());
    return j;
}

ojson run_classify(const Chain& chain, std::size_t N, const PipelineOptions& opt) {
    LimitVerdict combined = LimitVerdict::inconclusive;
    const auto obs = observe_limits(chain, N, opt, &combined);
    ojson j;
    j["verdict"] = std::string(to_string(combined));
    auto per = ojson::array();
    for (const auto& c : obs) per.push_back(classification_json(c));
    j["start_indices"] = per;
    return j;
}

ojson theorem_json(const TheoremReport& r) {
    ojson j;
    j["evidence"] = "numeric evidence, not proof";
    j["horizon"] = r.horizon;
    ojson hyp;
    if (r.theorem == "theorem3") {
        hyp["self_confidence"] = num(r.delta);
        hyp["typesymmetry_constant"] = num(r.typesymmetry);
    } else {
        hyp["balanced_asymmetry_constant"] = num(r.balanced_asymmetry);
    }
    hyp["hold"] = r.hypotheses_hold;
    hyp["note"] = r.hypothesis_note;
    j["hypotheses"] = hyp;
    auto flows = ojson::array();
    for (const auto& f : r.flows) {
        ojson fj;
        fj["universe"] = f.universe.to_string();
        fj["cardinality"] = f.cardinality;
        fj["trend"] = std::string(to_string(f.trend));
        fj["total"] = num(f.total);
        fj["one_sided_trend"] = std::string(to_string(f.one_sided_trend));
        fj["one_sided_total"] = num(f.one_sided_total);
        if (!f.witness.empty()) fj["witness_final"] = f.witness.back().to_string();
        flows.push_back(fj);
    }
    j["flows"] = flows;
    if (r.islands) {
        j["islands"] = partition_json(r.islands->classes);
        j["reachability_symmetric"] = r.islands->reachability_symmetric;
    }
    j["predicted"] = std::string(to_string(r.predicted));
    j["observed"] = std::string(to_string(r.observed_verdict));
    auto obs = ojson::array();
    for (const auto& c : r.observed) {
        obs.push_back(ojson{{"start_index", c.start_index},
                            {"verdict", std::string(to_string(c.verdict))},
                            {"groups", partition_json(c.groups)},
                            {"final_change", num(c.residuals.back().change)}});
    }
    j["observed_by_start_index"] = obs;
    j["agreement"] = r.agreement ? ojson(*r.agreement) : ojson(nullptr);
    j["islands_match_limit"] = r.islands_match_limit ? ojson(*r.islands_match_limit) : ojson(nullptr);
    j["findings"] = r.findings;
    return j;
}

ojson run_certificate(const Scenario& sc, const Simulation& sim, bool simulated) {
    const auto& c = sc.cucker_smale;
    const CsSpec spec(Kernel::power_law(c.K, c.sigma, c.beta), c.h);
    const CsState initial(points(c.positions), points(c.velocities));
    const auto input = CertificateInput::from_state(spec, initial);
    const auto cert = certificate_check(input);
    const auto cor = corollary_check(c.K, c.sigma, c.beta, input.agents, c.h, input.m_x, input.m_v);

    ojson j;
    j["inputs"] = ojson{{"agents", input.agents}, {"K", c.K},   {"sigma", c.sigma}, {"beta", c.beta},
                        {"h", c.h},               {"M_x", num(input.m_x)}, {"M_v", num(input.m_v)}};
    j["certified"] = cert.certified;
    j["kernel_guard"] = cert.kernel_guard;
    j["kernel_sup"] = num(cert.kernel_sup);
    j["integral"] = ojson{{"value", num(cert.integral.value)},
                          {"lower_bound", num(cert.integral.lower_bound)},
                          {"controlled", cert.integral.controlled},
                          {"method", cert.integral.method}};
    j["rhs"] = num(cert.rhs);
    j["margin"] = num(cert.margin);
    j["proof_form"] = ojson{{"lhs_3Mv", num(cert.proof_lhs)}, {"rhs_s_over_h_integral", num(cert.proof_rhs)}};
    j["closed_form"] = ojson{{"branch", cor.branch == 1 ? "beta <= 1/2" : "beta > 1/2"},
                             {"threshold", num(cor.threshold)},
                             {"margin", num(cor.margin)},
                             {"certified", cor.certified},
                             {"integral_certified", cor.integral_certified},
                             {"consistent", cor.consistent}};

    if (!simulated || !sim.cs_run) {
        j["monitor"] = "skipped: simulation unavailable";
        return j;
    }
    MonitorOptions mo;
    mo.epsilon = sc.tolerances.monitor;
    const auto trace = contraction_monitor(*sim.cs_spec, *sim.cs_run, mo);
    j["monitor"] = ojson{{"epsilon", mo.epsilon},
                         {"steps", trace.z.empty() ? 0 : trace.z.size() - 1},
                         {"contraction_violations", trace.contraction_violations},
                         {"rate_violations", trace.rate_violations},
                         {"gap_violations", trace.gap_violations},
                         {"z_increases", trace.z_increases},
                         {"worst_contraction_excess", num(trace.worst_contraction_excess)},
                         {"worst_rate_deficit", num(trace.worst_rate_deficit)},
                         {"worst_gap_excess", num(trace.worst_gap_excess)},
                         {"final_z", num(trace.z.back())},
                         {"final_g", num(trace.g.back())}};
    const auto& states = sim.cs_run->states;
    double running = 0.0;
    for (const auto& st : states) running = std::max(running, st.position_diameter());
    const double final_v = states.back().velocity_diameter();
    ojson observed;
    observed["final_velocity_spread"] = num(final_v);
    observed["velocity_consensus"] = final_v < sc.tolerances.limit;
    observed["max_position_diameter"] = num(running);
    observed["note"] = cert.certified
                           ? "certified: consensus is expected"
                           : "not certified: the certificate is sufficient only, no outcome is claimed";
    j["observed"] = observed;
    return j;
}

bool runs_in(Command cmd, Analysis a) {
    if (cmd == Command::simulate) return false;
    if (cmd == Command::certify) return a == Analysis::cs_certificate;
    return true;
}

}  // namespace

std::string to_string(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::analyze: return "analyze";
        case Command::certify: return "certify";
        case Command::report: return "report";
    }
    return "report";
}

RunReport run(const Scenario& scenario, const RunOptions& options) {
    validate(scenario);
    if (options.command == Command::certify && scenario.model != ModelKind::cucker_smale) {
        throw ValidationError("model", "certify needs a cucker-smale scenario");
    }
    if (options.out_dir) std::filesystem::create_directories(*options.out_dir);

    RunReport report;
    Stopwatch total;
    auto& body = report.body;
    body["command"] = to_string(options.command);
    body["evidence"] = "finite-horizon numeric evidence; no verdict here is a proof";
    body["scenario"] = to_json(scenario);

    std::vector<Analysis> analyses = scenario.analyses;
    if (options.command == Command::certify &&
        std::find(analyses.begin(), analyses.end(), Analysis::cs_certificate) == analyses.end()) {
        analyses.push_back(Analysis::cs_certificate);
    }

    Simulation sim;
    bool simulated = false;
    {
        Stopwatch w;
        try {
            sim = simulate(scenario);
            simulated = true;
            body["simulation"] = ojson{{"status", "ok"}, {"result", simulation_summary(scenario, sim)}};
        } catch (const Error& e) {
            report.analysis_error = true;
            body["simulation"] = ojson{{"status", "error"}, {"error", e.what()}};
        }
        report.timing["simulation_ms"] = w.elapsed_ms();
    }

    if (simulated && options.out_dir && scenario.output.trajectory &&
        (options.command == Command::simulate || options.command == Command::report)) {
        Stopwatch w;
        write_trajectory(*options.out_dir / "trajectory.csv", sim, scenario.output.trajectory_stride);
        body["trajectory"] = "trajectory.csv";
        report.timing["trajectory_ms"] = w.elapsed_ms();
    }

    const std::size_t N = scenario.horizon;
    const TrendPolicy policy = trend_policy(scenario.tolerances);
    PipelineOptions popt;
    popt.trend = policy;
    popt.limit = limit_tolerances(scenario.tolerances);

    auto results = ojson::array();
    ojson analysis_timing;
    for (Analysis a : analyses) {
        ojson entry;
        entry["name"] = to_string(a);
        if (!runs_in(options.command, a)) {
            entry["status"] = "skipped";
            entry["reason"] = "not run by " + to_string(options.command);
            results.push_back(entry);
            continue;
        }
        if (a == Analysis::cs_certificate && scenario.model != ModelKind::cucker_smale) {
            entry["status"] = "skipped";
            entry["reason"] = "cs-certificate applies to cucker-smale scenarios only";
            results.push_back(entry);
            continue;
        }
        if (!simulated && a != Analysis::cs_certificate) {
            entry["status"] = "skipped";
            entry["reason"] = "simulation failed";
            results.push_back(entry);
            continue;
        }
        Stopwatch w;
        try {
            ojson r;
            switch (a) {
                case Analysis::properties: r = run_properties(sim.realized, N, policy); break;
                case Analysis::interaction_graph:
                    r = run_interaction_graph(sim.realized, N, policy, options.out_dir);
                    break;
                case Analysis::classify: r = run_classify(sim.realized, N, popt); break;
                case Analysis::theorem1: r = theorem_json(theorem1_pipeline(sim.realized, N, popt)); break;
                case Analysis::theorem2: r = theorem_json(theorem2_pipeline(sim.realized, N, popt)); break;
                case Analysis::theorem3: r = theorem_json(theorem3_pipeline(sim.realized, N, popt)); break;
                case Analysis::cs_certificate: r = run_certificate(scenario, sim, simulated); break;
            }
            entry["status"] = "ok";
            entry["result"] = std::move(r);
        } catch (const std::exception& e) {
            report.analysis_error = true;
            entry["status"] = "error";
            entry["error"] = e.what();
        }
        analysis_timing[to_string(a)] = w.elapsed_ms();
        results.push_back(entry);
    }
    body["analyses"] = results;
    report.timing["analyses_ms"] = analysis_timing;
    report.timing["total_ms"] = total.elapsed_ms();

    if (options.out_dir) {
        std::ofstream(*options.out_dir / "report.json") << report.body_text();
        std::ofstream(*options.out_dir / "timing.json") << report.timing.dump(2) << "\n";
    }
    return report;
}

std::string summarize(const RunReport& report) {
    std::ostringstream os;
    const auto& b = report.body;
    os << "command: " << b["command"].get<std::string>() << "\n";
    const auto& sim = b["simulation"];
    if (sim["status"] == "ok") {
        const auto& r = sim["result"];
        os << "simulation: " << r["agents"] << " agents, " << r["steps"] << " steps, final spread "
           << r["final_spread"] << "\n";
    } else {
        os << "simulation: error: " << sim["error"].get<std::string>() << "\n";
    }
    for (const auto& a : b["analyses"]) {
        os << a["name"].get<std::string>() << ": " << a["status"].get<std::string>();
        if (a["status"] == "ok") {
            const auto& r = a["result"];
            if (r.contains("verdict")) os << ", verdict " << r["verdict"].get<std::string>();
            if (r.contains("predicted")) {
                os << ", predicted " << r["predicted"].get<std::string>() << ", observed "
                   << r["observed"].get<std::string>();
            }
            if (r.contains("islands")) os << ", islands " << r["islands"].dump();
            if (r.contains("certified")) os << ", certified " << (r["certified"].get<bool>() ? "yes" : "no");
        } else if (a.contains("error")) {
            os << ": " << a["error"].get<std::string>();
        } else if (a.contains("reason")) {
            os << " (" << a["reason"].get<std::string>() << ")";
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace ergo::cli
