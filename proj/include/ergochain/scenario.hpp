#pragma once

#include "ergochain/errors.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ergo::cli {

/// Malformed scenario or matrix-list text.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line;
};

/// Well-formed input that violates a scenario invariant.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message);
    std::string field;
};

enum class ModelKind { jlm, finite_range, cucker_smale, explicit_chain };

enum class Analysis {
    properties,
    interaction_graph,
    classify,
    theorem1,
    theorem2,
    theorem3,
    cs_certificate,
};

std::string to_string(ModelKind m);
std::string to_string(Analysis a);

struct Tolerances {
    double row = 1e-12;         // row-sum check on explicit matrices
    double limit = 1e-8;        // limit stabilization and row agreement
    double leak = 1e-8;         // class mass leak in limit blocks
    double divergence = 1e-8;   // tail average increment for divergent-trend
    double bounded = 1e-6;      // tail increment for bounded-trend
    double window = 0.25;       // trend window as a fraction of the horizon
    double monitor = 1e-10;     // slack in the contraction monitor

    bool operator==(const Tolerances&) const = default;
};

/// Applies NAME=VALUE; throws ValidationError for unknown names or bad values.
void apply_tolerance(Tolerances& t, const std::string& assignment);

using Edge = std::pair<std::size_t, std::size_t>;  // 0-based agents

struct JlmConfig {
    std::size_t agents = 0;
    /// complete | path | explicit | periodic | random | groups
    std::string kind = "complete";
    std::vector<Edge> edges;                       // explicit
    std::vector<std::vector<Edge>> steps;          // periodic
    double probability = 0.5;                      // random
    std::vector<std::vector<std::size_t>> groups;  // groups, or random restricted to groups

    bool operator==(const JlmConfig&) const = default;
};

struct FiniteRangeConfig {
    std::string kernel = "indicator";  // indicator | tent
    double radius = 1.0;
    std::vector<double> radii;  // per agent; overrides radius when present

    bool operator==(const FiniteRangeConfig&) const = default;
};

struct CsConfig {
    double K = 0.0;
    double sigma = 1.0;
    double beta = 1.0;
    double h = 0.1;
    std::vector<std::array<double, 3>> positions;
    std::vector<std::array<double, 3>> velocities;

    bool operator==(const CsConfig&) const = default;
};

struct ExplicitConfig {
    std::optional<std::string> file;  // matrix-list file, relative to the scenario
    std::vector<std::vector<std::vector<double>>> matrices;  // loaded or inline

    bool operator==(const ExplicitConfig&) const = default;
};

struct OutputConfig {
    bool trajectory = true;
    std::size_t trajectory_stride = 1;

    bool operator==(const OutputConfig&) const = default;
};

struct Scenario {
    ModelKind model = ModelKind::jlm;
    std::size_t horizon = 1000;
    std::uint64_t seed = 0;
    /// One row per agent; scalar models may use one column.
    std::vector<std::vector<double>> initial_state;
    std::vector<Analysis> analyses;
    Tolerances tolerances;
    OutputConfig output;

    JlmConfig jlm;
    FiniteRangeConfig finite_range;
    CsConfig cucker_smale;
    ExplicitConfig explicit_chain;

    std::size_t agents() const;
    bool operator==(const Scenario&) const = default;
};

/// Reads, fills defaults and validates. Relative matrix files resolve against
/// the scenario's directory.
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text,
                             const std::filesystem::path& base_dir = ".");
Scenario scenario_from_json(const nlohmann::json& j,
                            const std::filesystem::path& base_dir = ".");

/// Throws ValidationError naming the offending field.
void validate(const Scenario& s);

/// Canonical JSON form; parse(serialize(s)) == s.
nlohmann::ordered_json to_json(const Scenario& s);
std::string serialize(const Scenario& s);

/// Whitespace-separated rows, blank-line separated blocks, '#' comments.
std::vector<std::vector<std::vector<double>>> parse_matrix_list(std::istream& in);

}  // namespace ergo::cli
