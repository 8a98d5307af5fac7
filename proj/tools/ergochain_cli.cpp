// ergochain-cli: simulate consensus models and analyse their transition chains.
//
//   ergochain-cli <simulate|analyze|certify|report> --scenario FILE [--out DIR]
//                 [--seed U64] [--horizon N] [--tolerance NAME=VALUE]...
//
// Exit codes: 0 success, 1 invalid input, 2 some analysis failed.

#include "ergochain/runner.hpp"
#include "ergochain/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace ergo::cli;

    CLI::App app{"Ergodicity and class-ergodicity analysis of consensus chains"};
    app.require_subcommand(1, 1);

    std::string scenario_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::vector<std::string> tolerances;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
        sub->add_option("--out", out_dir, "Output directory for report and artifacts");
        sub->add_option("--seed", seed, "Override the scenario seed");
        sub->add_option("--horizon", horizon, "Override the scenario horizon");
        sub->add_option("--tolerance", tolerances, "NAME=VALUE (repeatable)")->take_all();
    };
    const std::pair<const char*, Command> commands[] = {
        {"simulate", Command::simulate},
        {"analyze", Command::analyze},
        {"certify", Command::certify},
        {"report", Command::report},
    };
    const char* help[] = {
        "Run the model and write its trajectory",
        "Run the model and the scenario's analyses",
        "Check the velocity-consensus certificate of a cucker-smale scenario",
        "Run everything and write all artifacts",
    };
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < 4; ++i) {
        subs.push_back(app.add_subcommand(commands[i].first, help[i]));
        add_common(subs.back());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunOptions options;
    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (subs[i]->parsed()) options.command = commands[i].second;
    }
    if (!out_dir.empty()) options.out_dir = out_dir;

    Scenario scenario;
    try {
        scenario = parse_scenario(scenario_path);
        if (seed) scenario.seed = *seed;
        if (horizon) scenario.horizon = *horizon;
        for (const auto& t : tolerances) apply_tolerance(scenario.tolerances, t);
        validate(scenario);
    } catch (const ergo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const auto report = run(scenario, options);
        std::cout << summarize(report);
        if (!options.out_dir) std::cout << report.body_text();
        return report.analysis_error ? 2 : 0;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
