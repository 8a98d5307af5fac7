#pragma once

#include "ergochain/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace ergo::cli {

enum class Command { simulate, analyze, certify, report };
std::string to_string(Command c);

struct RunOptions {
    Command command = Command::report;
    /// Artifacts are written here when set (created if missing).
    std::optional<std::filesystem::path> out_dir;
};

struct RunReport {
    /// Deterministic for a given scenario and seed.
    nlohmann::ordered_json body;
    /// Wall-clock phases in milliseconds; kept apart from the body.
    nlohmann::ordered_json timing;
    bool analysis_error = false;

    std::string body_text() const { return body.dump(2) + "\n"; }
};

/// Simulates the scenario's model and runs its analyses; each analysis
/// reports ok, error or skipped without affecting the others.
///
/// Artifacts under out_dir: report.json and timing.json always;
/// trajectory.csv for simulate and report (unless disabled in the
/// scenario); digraph.txt whenever the interaction graph is computed.
/// `certify` requires a cucker-smale scenario (ValidationError otherwise).
RunReport run(const Scenario& scenario, const RunOptions& options = {});

/// A few human-readable lines for the terminal.
std::string summarize(const RunReport& report);

}  // namespace ergo::cli
