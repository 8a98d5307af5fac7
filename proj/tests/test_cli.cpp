#include "ergochain/errors.hpp"
#include "ergochain/runner.hpp"
#include "ergochain/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ergo;
using namespace ergo::cli;
namespace fs = std::filesystem;

namespace {

const char* kJlm = R"({
  "model": "jlm",
  "horizon": 2000,
  "seed": 3,
  "initial_state": [[0], [1], [4], [9], [16], [25]],
  "jlm": {"kind": "random", "probability": 0.4, "groups": [[1, 2, 3], [4, 5, 6]]},
  "analyses": ["theorem3", "classify"]
})";

const char* kCs = R"({
  "model": "cucker-smale",
  "horizon": 3000,
  "cucker_smale": {
    "K": 0.15, "sigma": 1, "beta": 1, "h": 0.1,
    "positions": [[0, 0, 0], [0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]],
    "velocities": [[0.01, 0, 0], [0, 0.01, 0], [0, 0, 0.01], [0, 0, 0]]
  },
  "analyses": ["cs-certificate"]
})";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ergochain_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const nlohmann::ordered_json& analysis(const RunReport& r, const std::string& name) {
    for (const auto& a : r.body["analyses"])
        if (a["name"] == name) return a;
    throw std::runtime_error("analysis missing: " + name);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ERGO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Scenario, ParsesJlmWithDefaults) {
    const auto s = parse_scenario_text(kJlm);
    EXPECT_EQ(s.model, ModelKind::jlm);
    EXPECT_EQ(s.agents(), 6u);
    EXPECT_EQ(s.jlm.agents, 6u);
    EXPECT_EQ(s.jlm.groups.front(), (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(s.tolerances.limit, 1e-8);
    EXPECT_EQ(s.analyses, (std::vector<Analysis>{Analysis::theorem3, Analysis::classify}));
}

TEST(Scenario, RejectsInconsistentOrUnknownInput) {
    EXPECT_THROW(parse_scenario_text(R"({"model": "jlm", "jlm": {"agents": 3}, "initial_state": [[0], [1]]})"),
                 ValidationError);
    EXPECT_THROW(parse_scenario_text(R"({"model": "jlm", "initial_state": [[0]], "colour": 1})"), ValidationError);
    EXPECT_THROW(parse_scenario_text(R"({"model": "voter"})"), ValidationError);
    EXPECT_THROW(parse_scenario_text(R"({"model": "jlm", "initial_state": [[0]], "horizon": 0})"), ValidationError);
    try {
        parse_scenario_text("{\n  \"model\": \"jlm\",\n  \"horizon\": ,\n}");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 3u);
    }
}

TEST(Scenario, ToleranceOverrides) {
    Tolerances t;
    apply_tolerance(t, "limit=1e-6");
    EXPECT_EQ(t.limit, 1e-6);
    EXPECT_THROW(apply_tolerance(t, "limit"), ValidationError);
    EXPECT_THROW(apply_tolerance(t, "speed=3"), ValidationError);
    EXPECT_THROW(apply_tolerance(t, "limit=abc"), ValidationError);
}

TEST(Scenario, SerializeRoundTrips) {
    for (const char* text : {kJlm, kCs}) {
        const auto s = parse_scenario_text(text);
        EXPECT_EQ(parse_scenario_text(serialize(s)), s);
        EXPECT_EQ(serialize(parse_scenario_text(serialize(s))), serialize(s));
    }
}

TEST(MatrixList, ParsesBlocksAndComments) {
    std::istringstream in("# two steps\n1 0\n0 1\n\n0.5 0.5\n0.25 0.75\n");
    const auto ms = parse_matrix_list(in);
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_EQ(ms[1][1][0], 0.25);
    std::istringstream bad("1 0\n0 1\n\n1 0 0\n0 1 0\n0 0 1\n");
    EXPECT_THROW(parse_matrix_list(bad), ParseError);
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(parse_matrix_list(empty), ParseError);
}

TEST(Runner, JlmGroupsAreClassErgodic) {
    const auto r = run(parse_scenario_text(kJlm), {Command::analyze});
    EXPECT_FALSE(r.analysis_error);
    const auto& t3 = analysis(r, "theorem3");
    EXPECT_EQ(t3["status"], "ok");
    EXPECT_EQ(t3["result"]["predicted"], "class-ergodic");
    EXPECT_EQ(t3["result"]["observed"], "class-ergodic");
    EXPECT_EQ(t3["result"]["islands"].dump(), "[[1,2,3],[4,5,6]]");
    EXPECT_EQ(analysis(r, "classify")["result"]["verdict"], "class-ergodic");
}

TEST(Runner, ExplicitIdentityChainFromFile) {
    const auto dir = scratch("explicit");
    std::ofstream(dir / "chain.txt") << "1 0 0\n0 1 0\n0 0 1\n\n1 0 0\n0 1 0\n0 0 1\n";
    std::ofstream(dir / "scenario.json")
        << R"({"model": "explicit-chain", "explicit_chain": {"file": "chain.txt"}, "analyses": ["classify", "interaction-graph"]})";
    const auto s = parse_scenario(dir / "scenario.json");
    EXPECT_EQ(s.horizon, 2u);
    const auto r = run(s, {Command::report, dir / "out"});
    EXPECT_EQ(analysis(r, "classify")["result"]["verdict"], "class-ergodic");
    EXPECT_EQ(analysis(r, "interaction-graph")["result"]["islands"].size(), 3u);
    for (const char* f : {"report.json", "timing.json", "trajectory.csv", "digraph.txt"})
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    std::ifstream csv(dir / "out" / "trajectory.csv");
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "n,agent,component,value");
}

TEST(Runner, CertifiedCuckerSmaleReachesConsensus) {
    const auto r = run(parse_scenario_text(kCs), {Command::certify});
    const auto& c = analysis(r, "cs-certificate");
    ASSERT_EQ(c["status"], "ok");
    EXPECT_TRUE(c["result"]["certified"].get<bool>());
    EXPECT_TRUE(c["result"]["closed_form"]["consistent"].get<bool>());
    EXPECT_EQ(c["result"]["monitor"]["contraction_violations"], 0);
    EXPECT_LT(c["result"]["observed"]["final_velocity_spread"].get<double>(), 1e-8);
    EXPECT_TRUE(c["result"]["observed"]["velocity_consensus"].get<bool>());
}

TEST(Runner, CommandSemantics) {
    const auto sim = run(parse_scenario_text(kJlm), {Command::simulate});
    for (const auto& a : sim.body["analyses"]) EXPECT_EQ(a["status"], "skipped");
    EXPECT_THROW(run(parse_scenario_text(kJlm), {Command::certify}), ValidationError);
    auto s = parse_scenario_text(kJlm);
    s.analyses.push_back(Analysis::cs_certificate);
    EXPECT_EQ(analysis(run(s, {Command::analyze}), "cs-certificate")["status"], "skipped");
}

TEST(Runner, BodiesAreDeterministic) {
    const auto s = parse_scenario_text(kJlm);
    EXPECT_EQ(run(s).body_text(), run(s).body_text());
    const auto c = parse_scenario_text(kCs);
    EXPECT_EQ(run(c).body_text(), run(c).body_text());
}

TEST(Runner, ReportCarriesScenarioAndEvidenceNote) {
    const auto r = run(parse_scenario_text(kCs));
    EXPECT_EQ(r.body["command"], "report");
    EXPECT_TRUE(r.body.contains("evidence"));
    EXPECT_EQ(r.body["scenario"], to_json(parse_scenario_text(kCs)));
    EXPECT_EQ(r.body["simulation"]["status"], "ok");
    EXPECT_EQ(r.body["simulation"]["result"]["agents"], 4);
    EXPECT_TRUE(r.timing.contains("total_ms"));
    EXPECT_NE(summarize(r).find("certified yes"), std::string::npos);
}

TEST(Executable, ExitCodes) {
    const auto dir = scratch("exe");
    std::ofstream(dir / "ok.json") << kCs;
    std::ofstream(dir / "broken.json") << "{ \"model\": ";
    std::ofstream(dir / "invalid.json") << R"({"model": "jlm", "initial_state": [[0]], "horizon": 0})";
    std::ofstream(dir / "jlm.json") << kJlm;
    const std::string d = dir.string() + "/";
    EXPECT_EQ(run_cli("certify --scenario " + d + "ok.json --out " + d + "out"), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));
    EXPECT_EQ(run_cli("report --scenario " + d + "broken.json"), 1);
    EXPECT_EQ(run_cli("report --scenario " + d + "invalid.json"), 1);
    EXPECT_EQ(run_cli("report --scenario " + d + "missing.json"), 1);
    EXPECT_EQ(run_cli("certify --scenario " + d + "jlm.json"), 1);
    EXPECT_EQ(run_cli("analyze --scenario " + d + "jlm.json --tolerance nope=1"), 1);
    EXPECT_EQ(run_cli("analyze --scenario " + d + "jlm.json --horizon 500 --seed 9"), 0);
    EXPECT_NE(run_cli("frobnicate"), 0);
}

TEST(Executable, OutputMatchesLibraryRun) {
    const auto dir = scratch("same");
    std::ofstream(dir / "s.json") << kJlm;
    ASSERT_EQ(run_cli("analyze --scenario " + (dir / "s.json").string() + " --out " + (dir / "out").string()), 0);
    std::ifstream in(dir / "out" / "report.json");
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_EQ(text.str(), run(parse_scenario(dir / "s.json"), {Command::analyze}).body_text());
}
