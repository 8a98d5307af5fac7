// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"

#include "ergochain/cs_certificate.hpp"
#include "ergochain/interaction_graph.hpp"
#include "ergochain/limit_analysis.hpp"
#include "ergochain/models.hpp"
#include "ergochain/pipelines.hpp"
#include "ergochain/properties.hpp"
#include "ergochain/runner.hpp"
#include "ergochain/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ergo;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------

Outcome stochasticity_preservation() {
    std::mt19937_64 rng(1001);
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t products = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t s = 1 + rng() % 8;
        const std::size_t len = 1 + rng() % 100;
        const double zero_p = static_cast<double>(rng() % 4) / 4.0;
        std::vector<StochasticMatrix> ms;
        for (std::size_t m = 0; m < len; ++m) ms.push_back(oracle::random_stochastic(s, rng, zero_p));
        const Chain chain(ms);
        // Every A(n, 0), built incrementally so each product is validated.
        for (std::size_t n = 1; n <= len; ++n) {
            const auto p = backward_product(chain, 0, n);
            const Matrix& e = p.entries();
            worst = std::max(worst, (e.rowwise().sum().array() - 1.0).abs().maxCoeff());
            validate_matrix(e, 1e-9);
            ++products;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst <= 1e-9 && secs < 10.0,
            fmt("%zu products, worst row-sum error %.2e, %.2f s", products, worst, secs)};
}

std::vector<std::vector<std::size_t>> random_groups(std::size_t s, std::mt19937_64& rng) {
    std::vector<std::size_t> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t parts = 1 + rng() % 3;
    std::vector<std::vector<std::size_t>> g(parts);
    for (std::size_t i = 0; i < s; ++i) g[i % parts].push_back(order[i]);
    for (auto& x : g) std::sort(x.begin(), x.end());
    return g;
}

Outcome jlm_class_ergodicity() {
    std::mt19937_64 meta(2002);
    std::size_t ok = 0, classes = 0;
    std::string first_failure;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const double p = 0.05 + 0.9 * std::uniform_real_distribution<double>()(meta);
        const auto groups = random_groups(6, meta);
        const auto chain = jlm_chain(JlmSchedule::random(6, p, 10000, seed, groups), 10000);
        const auto r = theorem3_pipeline(chain, 10000);
        bool good = r.predicted == Prediction::class_ergodic;
        for (const auto& obs : r.observed) {
            const bool multiple = obs.verdict == LimitVerdict::ergodic || obs.verdict == LimitVerdict::class_ergodic;
            good = good && multiple && obs.stabilized && obs.residuals.back().change < 1e-8 &&
                   same_partition(obs.groups, groups);
        }
        good = good && r.observed.size() == default_start_indices(10000).size();
        if (good) {
            ++ok;
            classes += groups.size() > 1;
        } else if (first_failure.empty()) {
            first_failure = fmt("; first failure seed %llu", static_cast<unsigned long long>(seed));
        }
    }
    return {ok == 50, fmt("%zu/50 schedules confirmed at every start index (%zu with >1 class)%s", ok,
                          classes, first_failure.c_str())};
}

Outcome jlm_connectivity() {
    const std::size_t N = 10000;
    // Permanently connected: a path.
    const auto path = jlm_chain(JlmSchedule::fixed(NeighborGraph::path(6)), N);
    LimitVerdict v{};
    const auto obs = observe_limits(path, N, {}, &v);
    double spread = 0.0;
    for (const auto& o : obs) spread = std::max(spread, o.residuals.back().row_spread);
    const std::vector<double> x0{0, 1, 2, 3, 4, 5};
    const auto traj = trajectory(path, StateVector::scalar(x0), N);
    const Matrix& xf = traj.states.back().values();
    const double state_spread = xf.maxCoeff() - xf.minCoeff();
    const bool connected_ok = v == LimitVerdict::ergodic && spread < 1e-8 && state_spread < 1e-8;

    // Two components {1,2,3} and {4,5,6}.
    const std::vector<std::vector<std::size_t>> comps{{0, 1, 2}, {3, 4, 5}};
    const auto split = jlm_chain(JlmSchedule::fixed(NeighborGraph::groups(6, comps)), N);
    const auto t2 = theorem2_pipeline(split, N);
    const auto dp = absolute_flow_worst_case(split, 3, N);
    const AgentSet a{0, 1, 2}, b{3, 4, 5};
    bool witness_ok = !dp.witness.empty();
    for (const auto& w : dp.witness) witness_ok = witness_ok && (w == a || w == b);
    const bool split_ok = t2.observed_verdict == LimitVerdict::class_ergodic && t2.islands &&
                          same_partition(t2.islands->classes, comps) && dp.trend == Trend::bounded &&
                          witness_ok;
    return {connected_ok && split_ok,
            fmt("connected: %s, row spread %.1e, state spread %.1e; split: %s, %zu islands, DP %s (total %.3g), "
                "witness %s",
                std::string(to_string(v)).c_str(), spread, state_spread,
                std::string(to_string(t2.observed_verdict)).c_str(), t2.islands ? t2.islands->classes.size() : 0,
                std::string(to_string(dp.trend)).c_str(), dp.total(),
                dp.witness.empty() ? "-" : dp.witness.back().to_string().c_str())};
}

struct KrauseCheck {
    bool ok = false;
    std::string text;
};

KrauseCheck krause_run(const std::vector<double>& x0, double R) {
    const auto gen = finite_range_generator(FiniteRangeSpec::krause(R));
    StateVector x = StateVector::scalar(x0);
    std::size_t fixed_at = 0;
    for (std::size_t n = 0; n < 10000; ++n) {
        const StateVector next = step(x, gen(x, n));
        const double change = (next.values() - x.values()).cwiseAbs().maxCoeff();
        x = next;
        if (change < 1e-12) {
            fixed_at = n + 1;
            break;
        }
    }
    std::vector<double> v(x.values().data(), x.values().data() + x.agents());
    std::sort(v.begin(), v.end());
    // Clusters: runs of values within 1e-6 of each other; spread and gaps are then measured.
    std::vector<std::vector<double>> clusters{{v.front()}};
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] - v[i - 1] > 1e-6) clusters.emplace_back();
        clusters.back().push_back(v[i]);
    }
    double spread = 0.0, gap = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        spread = std::max(spread, clusters[c].back() - clusters[c].front());
        if (c > 0) gap = std::min(gap, clusters[c].front() - clusters[c - 1].back());
    }
    KrauseCheck k;
    k.ok = fixed_at > 0 && spread < 1e-8 && (clusters.size() == 1 || gap > R);
    k.text = fmt("fixed point at step %zu, %zu clusters, max spread %.1e, min gap %.3f", fixed_at,
                 clusters.size(), spread, clusters.size() > 1 ? gap : 0.0);
    return k;
}

Outcome krause_clustering() {
    std::vector<double> spaced(10), dense(10);
    for (std::size_t i = 0; i < 10; ++i) {
        spaced[i] = 10.0 * static_cast<double>(i) / 9.0;
        dense[i] = 0.5 * static_cast<double>(i);
    }
    const auto main = krause_run(spaced, 1.0);
    // Denser start in which agents actually interact before splitting.
    const auto extra = krause_run(dense, 1.0);
    return {main.ok && extra.ok, "[0,10]: " + main.text + "; [0,4.5]: " + extra.text};
}

Outcome doubly_stochastic_balance() {
    std::mt19937_64 rng(5005);
    double worst = 0.0, worst_brute = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t s = 2 + trial % 5;
        const Chain chain({oracle::random_doubly_stochastic(s, rng)});
        const double m = balanced_asymmetry_constant(chain, 1);
        const double brute = oracle::brute_balanced_asymmetry(chain, 1);
        worst = std::max({worst, std::abs(m - 1.0), std::abs(m - brute)});
        worst_brute = std::max(worst_brute, std::abs(brute - 1.0));
    }
    return {worst <= 1e-12 && worst_brute <= 1e-12,
            fmt("100 matrices, max |M - 1| or |M - brute| = %.2e, brute max |M - 1| = %.2e", worst, worst_brute)};
}

CsState segment_flock(std::size_t s, double mx, double mv, std::mt19937_64& rng) {
    // Positions on a segment of length mx, velocities on one of length mv,
    // so the diameters are exactly mx and mv.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::Vector3d dx(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5), dv(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5);
    dx.normalize();
    dv.normalize();
    const Eigen::Vector3d base(u(rng), u(rng), u(rng)), drift(u(rng), u(rng), u(rng));
    Positions x(static_cast<Eigen::Index>(s), 3), v(static_cast<Eigen::Index>(s), 3);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double a = i == 0 ? 0.0 : i == 1 ? 1.0 : u(rng);
        const double b = i == 0 ? 1.0 : i == 1 ? 0.0 : u(rng);
        x.row(i) = (base + a * mx * dx).transpose();
        v.row(i) = (drift + b * mv * dv).transpose();
    }
    return CsState(x, v);
}

Outcome cs_contraction() {
    std::mt19937_64 rng(6006);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t runs_ok = 0, total_violations = 0, certified = 0;
    double worst_excess = 0.0;
    for (int run = 0; run < 20; ++run) {
        const std::size_t s = 5;
        const double sigma = 0.5 + 2.5 * u(rng);
        const double beta = 0.25 + 1.75 * u(rng);
        const double K = (0.2 + 0.75 * u(rng)) * std::pow(sigma, 2 * beta) / static_cast<double>(s);
        const double h = 0.02 + 0.5 * u(rng);
        const CsSpec spec(Kernel::power_law(K, sigma, beta), h);
        const auto start = segment_flock(s, 0.5 + 5 * u(rng), 0.05 + 3 * u(rng), rng);
        certified += certificate_check(CertificateInput::from_state(spec, start)).certified;
        const auto trace = contraction_monitor(spec, simulate_cs(spec, start, 10000));
        total_violations += trace.violations();
        worst_excess = std::max({worst_excess, trace.worst_contraction_excess, trace.worst_rate_deficit,
                                 trace.worst_gap_excess});
        runs_ok += trace.violations() == 0 && trace.z.size() == 10001;
    }
    return {runs_ok == 20,
            fmt("%zu/20 runs clean (%zu certified), %zu violations, worst excess %.2e", runs_ok, certified,
                total_violations, worst_excess)};
}

struct CsOutcome {
    double final_spread = 0.0;
    double max_diameter = 0.0;
    double max_diameter_half = 0.0;  // running max at N/2
    std::size_t consensus_step = 0;  // first step with spread < 1e-8 (0: never)
};

CsOutcome run_cs(const CsSpec& spec, CsState state, std::size_t horizon) {
    CsOutcome o;
    o.max_diameter = state.position_diameter();
    for (std::size_t n = 1; n <= horizon; ++n) {
        state = cs_step(spec, state).next;
        o.max_diameter = std::max(o.max_diameter, state.position_diameter());
        if (n == horizon / 2) o.max_diameter_half = o.max_diameter;
        if (o.consensus_step == 0 && state.velocity_diameter() < 1e-8) o.consensus_step = n;
    }
    o.final_spread = state.velocity_diameter();
    return o;
}

Outcome cs_certificate_validity() {
    std::mt19937_64 rng(7007);
    const std::size_t s = 5;
    const std::size_t N = 100000;
    std::size_t grid = 0, certified = 0, reached = 0, stable = 0, corollary = 0, subset_violations = 0;
    std::size_t slowest = 0;
    double worst_growth = 0.0;
    for (double sigma : {1.0, 2.0, 3.0})
        for (double beta : {0.75, 1.0, 1.25, 1.5})
            for (double mx : {0.5, 1.0, 2.0, 4.0})
                for (double h : {0.05, 0.1, 0.5})
                    for (double frac : {0.1, 0.5, 0.9}) {
                        ++grid;
                        const double K = 0.9 * std::pow(sigma, 2 * beta) / static_cast<double>(s);
                        const CsSpec spec(Kernel::power_law(K, sigma, beta), h);
                        const double rhs =
                            certificate_check(CertificateInput{spec, s, mx, 0.0}).rhs;
                        const double mv = frac * rhs;
                        const auto start = segment_flock(s, mx, mv, rng);
                        const auto cert = certificate_check(CertificateInput::from_state(spec, start));
                        const auto cor = corollary_check(K, sigma, beta, s, h, start.position_diameter(),
                                                         start.velocity_diameter());
                        corollary += cor.certified;
                        if (cor.certified && !cert.certified) ++subset_violations;
                        if (!cert.certified) continue;  // no claim for non-certified sets
                        ++certified;
                        const auto o = run_cs(spec, start, N);
                        if (o.final_spread < 1e-8 && o.consensus_step > 0) ++reached;
                        slowest = std::max(slowest, o.consensus_step);
                        // Stabilized: no growth over the second half of the run beyond the
                        // drift left by rounding-level velocity differences.
                        const double growth = (o.max_diameter - o.max_diameter_half) / std::max(1.0, o.max_diameter_half);
                        worst_growth = std::max(worst_growth, growth);
                        if (growth <= 1e-9) ++stable;
                    }
    const bool ok = certified >= 100 && reached == certified && stable == certified && subset_violations == 0;
    return {ok, fmt("%zu grid sets, %zu certified; consensus %zu/%zu (slowest at step %zu); diameter stable "
                    "%zu/%zu (worst second-half growth %.1e); corollary-certified %zu, not integral-certified %zu",
                    grid, certified, reached, certified, slowest, stable, certified, worst_growth, corollary,
                    subset_violations)};
}

Outcome half_power_branch() {
    std::mt19937_64 rng(8008);
    const std::size_t s = 5;
    const double sigma = 10.0, K = 1.8, mx = 20.0, h = 0.1;
    // The beta = 1 closed-form threshold for the same K, sigma, M_x, h.
    const double beta1 = corollary_check(K, sigma, 1.0, s, h, mx, 0.0).threshold;
    std::size_t runs = 0, ok = 0;
    double worst = 0.0;
    for (double mult : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        for (int rep = 0; rep < 2; ++rep) {
            const auto start = segment_flock(s, mx, mult * beta1, rng);
            const CsSpec spec(Kernel::power_law(K, sigma, 0.5), h);
            const auto cor = corollary_check(K, sigma, 0.5, s, h, start.position_diameter(), start.velocity_diameter());
            const auto cert = certificate_check(CertificateInput::from_state(spec, start));
            const auto o = run_cs(spec, start, 100000);
            ++runs;
            worst = std::max(worst, o.final_spread);
            ok += cor.certified && cor.branch == 1 && cert.certified && o.final_spread < 1e-8;
        }
    }
    return {ok == runs, fmt("K/sigma = %.3f < 1/s = %.3f, beta=1 threshold %.4g, M_v up to %.4g; %zu/%zu certified "
                            "runs reached consensus (worst final spread %.1e)",
                            K / sigma, 1.0 / static_cast<double>(s), beta1, 10 * beta1, ok, runs, worst)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(9009);
    double worst_product = 0.0;
    std::size_t products = 0, flows = 0, mismatches = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t s = 1 + trial % 4;
        const std::size_t len = 1 + rng() % 6;
        std::vector<StochasticMatrix> ms;
        for (std::size_t m = 0; m < len; ++m) ms.push_back(oracle::random_stochastic(s, rng, 0.3));
        const Chain chain(ms);
        for (std::size_t k = 0; k < len; ++k)
            for (std::size_t n = k; n <= len; ++n) {
                const Matrix fast = backward_product(chain, k, n).entries();
                const auto slow = oracle::naive_backward_product(chain, k, n);
                for (std::size_t i = 0; i < s; ++i)
                    for (std::size_t j = 0; j < s; ++j)
                        worst_product = std::max(worst_product, std::abs(fast(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - slow[i][j]));
                ++products;
            }
    }
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t s = 2 + trial % 3;
        const std::size_t horizon = 1 + trial % 5;
        std::vector<StochasticMatrix> ms;
        for (std::size_t m = 0; m < horizon; ++m) ms.push_back(oracle::random_dyadic_stochastic(s, rng));
        const Chain chain(ms);
        for (std::size_t c = 1; c < s; ++c)
            for (bool one_sided : {false, true}) {
                const double dp = absolute_flow_worst_case(chain, c, horizon, one_sided).total();
                const double brute = oracle::brute_worst_case_flow(chain, c, horizon, one_sided);
                mismatches += dp != brute;
                ++flows;
            }
    }
    return {worst_product <= 1e-14 && mismatches == 0,
            fmt("%zu products, worst entry difference %.2e; %zu DP/exhaustive flow pairs, %zu inexact", products,
                worst_product, flows, mismatches)};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const std::vector<std::string> scenarios{
        R"({"model": "jlm", "horizon": 3000, "seed": 11, "initial_state": [[0],[1],[2],[3],[4],[5]],
            "jlm": {"kind": "random", "probability": 0.3},
            "analyses": ["properties", "interaction-graph", "classify", "theorem1", "theorem2", "theorem3"]})",
        R"({"model": "finite-range", "horizon": 500, "initial_state": [[0],[0.5],[1],[1.5],[2],[4],[4.5],[9]],
            "finite_range": {"kernel": "indicator", "radius": 1},
            "analyses": ["interaction-graph", "classify", "theorem3"]})",
        R"({"model": "cucker-smale", "horizon": 2000, "seed": 4,
            "cucker_smale": {"K": 0.15, "sigma": 1, "beta": 1.25, "h": 0.1,
              "positions": [[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1]],
              "velocities": [[0.1,0,0],[0,0.1,0],[0,0,0.1],[0,0,0],[0.05,0.05,0]]},
            "analyses": ["cs-certificate", "theorem3"]})"};
    std::size_t identical = 0;
    for (const auto& text : scenarios) {
        const auto s = cli::parse_scenario_text(text);
        identical += cli::run(s).body_text() == cli::run(s).body_text();
    }
    // Through the executable, twice, comparing the written report files.
    bool exe_ok = true;
    const auto dir = std::filesystem::temp_directory_path() / "ergochain_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "s.json") << scenarios[0];
    for (const char* out : {"a", "b"}) {
        const std::string cmd = std::string(ERGO_CLI_PATH) + " report --scenario " + (dir / "s.json").string() +
                                " --out " + (dir / out).string() + " > /dev/null 2>&1";
        exe_ok = exe_ok && std::system(cmd.c_str()) == 0;
    }
    const std::string a = read_file(dir / "a" / "report.json"), b = read_file(dir / "b" / "report.json");
    exe_ok = exe_ok && !a.empty() && a == b && read_file(dir / "a" / "trajectory.csv") == read_file(dir / "b" / "trajectory.csv");
    return {identical == scenarios.size() && exe_ok,
            fmt("%zu/%zu scenarios byte-identical in-process; executable reports %s", identical, scenarios.size(),
                exe_ok ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "stochasticity preservation", stochasticity_preservation},
        {2, "JLM class-ergodicity", jlm_class_ergodicity},
        {3, "JLM consensus iff connectivity", jlm_connectivity},
        {4, "Krause clustering", krause_clustering},
        {5, "doubly stochastic balanced asymmetry", doubly_stochastic_balance},
        {6, "C-S contraction monitor", cs_contraction},
        {7, "C-S certificate validity", cs_certificate_validity},
        {8, "beta <= 1/2 branch", half_power_branch},
        {9, "oracle equivalence", oracle_equivalence},
        {10, "determinism", determinism},
    };
    // Optional filter: acceptance 3 7 runs only those criteria.
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
