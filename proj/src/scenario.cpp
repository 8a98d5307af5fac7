#include "ergochain/scenario.hpp"

#include "ergochain/agent_set.hpp"
#include "ergochain/chain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ergo::cli {

namespace {

std::string line_message(std::size_t line, const std::string& message) {
    std::ostringstream os;
    os << "line " << line << ": " << message;
    return os.str();
}

using json = nlohmann::json;

constexpr std::pair<ModelKind, const char*> kModels[] = {
    {ModelKind::jlm, "jlm"},
    {ModelKind::finite_range, "finite-range"},
    {ModelKind::cucker_smale, "cucker-smale"},
    {ModelKind::explicit_chain, "explicit-chain"},
};

constexpr std::pair<Analysis, const char*> kAnalyses[] = {
    {Analysis::properties, "properties"},
    {Analysis::interaction_graph, "interaction-graph"},
    {Analysis::classify, "classify"},
    {Analysis::theorem1, "theorem1"},
    {Analysis::theorem2, "theorem2"},
    {Analysis::theorem3, "theorem3"},
    {Analysis::cs_certificate, "cs-certificate"},
};

const char* const kJlmKinds[] = {"complete", "path", "explicit", "periodic", "random", "groups"};

void allow_keys(const json& j, const std::string& field, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ValidationError(field, "expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
            throw ValidationError(field.empty() ? key : field + "." + key, "unknown key");
        }
    }
}

double get_double(const json& j, const std::string& field) {
    if (!j.is_number()) throw ValidationError(field, "expected a number");
    return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& field) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        throw ValidationError(field, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& field) {
    if (!j.is_string()) throw ValidationError(field, "expected a string");
    return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& field) {
    if (!j.is_boolean()) throw ValidationError(field, "expected true or false");
    return j.get<bool>();
}

const json& get_array(const json& j, const std::string& field) {
    if (!j.is_array()) throw ValidationError(field, "expected an array");
    return j;
}

std::size_t get_agent(const json& j, const std::string& field) {
    const auto id = get_unsigned(j, field);
    if (id == 0) throw ValidationError(field, "agent ids are 1-based");
    return static_cast<std::size_t>(id - 1);
}

std::vector<Edge> get_edges(const json& j, const std::string& field) {
    std::vector<Edge> out;
    for (std::size_t e = 0; e < get_array(j, field).size(); ++e) {
        const std::string f = field + "[" + std::to_string(e) + "]";
        const auto& pair = get_array(j[e], f);
        if (pair.size() != 2) throw ValidationError(f, "an edge is a pair of agent ids");
        out.emplace_back(get_agent(pair[0], f), get_agent(pair[1], f));
    }
    return out;
}

std::vector<std::vector<std::size_t>> get_groups(const json& j, const std::string& field) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t g = 0; g < get_array(j, field).size(); ++g) {
        const std::string f = field + "[" + std::to_string(g) + "]";
        auto& group = out.emplace_back();
        for (const auto& id : get_array(j[g], f)) group.push_back(get_agent(id, f));
    }
    return out;
}

std::vector<double> get_doubles(const json& j, const std::string& field) {
    std::vector<double> out;
    for (const auto& v : get_array(j, field)) out.push_back(get_double(v, field));
    return out;
}

std::vector<std::array<double, 3>> get_points(const json& j, const std::string& field) {
    std::vector<std::array<double, 3>> out;
    for (std::size_t i = 0; i < get_array(j, field).size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        std::array<double, 3> p{0.0, 0.0, 0.0};
        if (j[i].is_number()) {
            p[0] = j[i].get<double>();
        } else {
            const auto coords = get_doubles(j[i], f);
            if (coords.empty() || coords.size() > 3) {
                throw ValidationError(f, "expected 1 to 3 coordinates");
            }
            std::copy(coords.begin(), coords.end(), p.begin());
        }
        out.push_back(p);
    }
    return out;
}

nlohmann::ordered_json edges_json(const std::vector<Edge>& edges) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& [a, b] : edges) out.push_back(nlohmann::ordered_json::array({a + 1, b + 1}));
    return out;
}

nlohmann::ordered_json groups_json(const std::vector<std::vector<std::size_t>>& groups) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& g : groups) {
        auto members = nlohmann::ordered_json::array();
        for (auto a : g) members.push_back(a + 1);
        out.push_back(members);
    }
    return out;
}

void require(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ValidationError(field, message);
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_agent(std::size_t a, std::size_t s, const std::string& field) {
    require(a < s, field, "agent id " + std::to_string(a + 1) + " exceeds agent count " +
                              std::to_string(s));
}

void check_edges(const std::vector<Edge>& edges, std::size_t s, const std::string& field) {
    for (const auto& [a, b] : edges) {
        check_agent(a, s, field);
        check_agent(b, s, field);
        require(a != b, field, "self-links are implicit");
    }
}

void check_groups(const std::vector<std::vector<std::size_t>>& groups, std::size_t s,
                  const std::string& field) {
    std::set<std::size_t> seen;
    for (const auto& g : groups) {
        for (auto a : g) {
            check_agent(a, s, field);
            require(seen.insert(a).second, field, "groups must be disjoint");
        }
    }
}

}  // namespace

ParseError::ParseError(std::size_t line_, const std::string& message)
    : Error(line_message(line_, message)), line(line_) {}

ValidationError::ValidationError(std::string field_, const std::string& message)
    : Error(field_ + ": " + message), field(std::move(field_)) {}

std::string to_string(ModelKind m) {
    for (const auto& [k, name] : kModels) {
        if (k == m) return name;
    }
    return "unknown";
}

std::string to_string(Analysis a) {
    for (const auto& [k, name] : kAnalyses) {
        if (k == a) return name;
    }
    return "unknown";
}

void apply_tolerance(Tolerances& t, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("tolerance", "expected NAME=VALUE, got '" + assignment + "'");
    }
    const std::string name = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ValidationError("tolerances." + name, "not a number: '" + text + "'");
    }
    double* slot = nullptr;
    if (name == "row") slot = &t.row;
    else if (name == "limit") slot = &t.limit;
    else if (name == "leak") slot = &t.leak;
    else if (name == "divergence") slot = &t.divergence;
    else if (name == "bounded") slot = &t.bounded;
    else if (name == "window") slot = &t.window;
    else if (name == "monitor") slot = &t.monitor;
    if (slot == nullptr) throw ValidationError("tolerances." + name, "unknown tolerance");
    *slot = value;
}

std::size_t Scenario::agents() const {
    switch (model) {
        case ModelKind::jlm: return jlm.agents;
        case ModelKind::finite_range: return initial_state.size();
        case ModelKind::cucker_smale: return cucker_smale.positions.size();
        case ModelKind::explicit_chain:
            return explicit_chain.matrices.empty() ? 0 : explicit_chain.matrices.front().size();
    }
    return 0;
}

std::vector<std::vector<std::vector<double>>> parse_matrix_list(std::istream& in) {
    std::vector<std::vector<std::vector<double>>> blocks;
    std::vector<std::vector<double>> current;
    std::string raw;
    std::size_t line = 0;
    std::size_t block_start = 0;
    const auto close_block = [&] {
        if (current.empty()) return;
        for (const auto& row : current) {
            if (row.size() != current.size()) {
                throw ParseError(block_start, "matrix block starting here is not square (" +
                                                  std::to_string(current.size()) + " rows, " +
                                                  std::to_string(row.size()) + " columns)");
            }
        }
        if (!blocks.empty() && blocks.front().size() != current.size()) {
            throw ParseError(block_start, "matrix size differs from the first block");
        }
        blocks.push_back(std::move(current));
        current.clear();
    };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream fields(raw);
        std::vector<double> row;
        std::string token;
        while (fields >> token) {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
            if (ec != std::errc() || end != token.data() + token.size()) {
                throw ParseError(line, "not a real number: '" + token + "'");
            }
            row.push_back(v);
        }
        if (row.empty()) {
            close_block();
            continue;
        }
        if (current.empty()) block_start = line;
        current.push_back(std::move(row));
    }
    close_block();
    if (blocks.empty()) throw ParseError(line, "no matrices found");
    return blocks;
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    allow_keys(j, "", {"model", "horizon", "seed", "initial_state", "analyses", "tolerances",
                       "output", "jlm", "finite_range", "cucker_smale", "explicit_chain"});
    Scenario s;

    if (!j.contains("model")) throw ValidationError("model", "required");
    const std::string model = get_string(j["model"], "model");
    const auto m = std::find_if(std::begin(kModels), std::end(kModels),
                                [&](const auto& p) { return model == p.second; });
    if (m == std::end(kModels)) throw ValidationError("model", "unknown model '" + model + "'");
    s.model = m->first;

    if (j.contains("seed")) s.seed = get_unsigned(j["seed"], "seed");

    if (j.contains("initial_state")) {
        const auto& init = get_array(j["initial_state"], "initial_state");
        for (std::size_t i = 0; i < init.size(); ++i) {
            const std::string f = "initial_state[" + std::to_string(i) + "]";
            if (init[i].is_number()) {
                s.initial_state.push_back({init[i].get<double>()});
            } else {
                s.initial_state.push_back(get_doubles(init[i], f));
            }
        }
    }

    if (j.contains("analyses")) {
        for (const auto& a : get_array(j["analyses"], "analyses")) {
            const std::string name = get_string(a, "analyses");
            const auto it = std::find_if(std::begin(kAnalyses), std::end(kAnalyses),
                                         [&](const auto& p) { return name == p.second; });
            if (it == std::end(kAnalyses)) {
                throw ValidationError("analyses", "unknown analysis '" + name + "'");
            }
            s.analyses.push_back(it->first);
        }
    }

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        allow_keys(t, "tolerances",
                   {"row", "limit", "leak", "divergence", "bounded", "window", "monitor"});
        for (const auto& [key, value] : t.items()) {
            std::ostringstream assignment;
            assignment.precision(17);
            assignment << key << '=' << get_double(value, "tolerances." + key);
            apply_tolerance(s.tolerances, assignment.str());
        }
    }

    if (j.contains("output")) {
        const auto& o = j["output"];
        allow_keys(o, "output", {"trajectory", "trajectory_stride"});
        if (o.contains("trajectory")) s.output.trajectory = get_bool(o["trajectory"], "output.trajectory");
        if (o.contains("trajectory_stride")) {
            s.output.trajectory_stride = get_unsigned(o["trajectory_stride"], "output.trajectory_stride");
        }
    }

    if (j.contains("jlm")) {
        const auto& c = j["jlm"];
        allow_keys(c, "jlm", {"agents", "kind", "edges", "steps", "probability", "groups"});
        if (c.contains("agents")) s.jlm.agents = get_unsigned(c["agents"], "jlm.agents");
        if (c.contains("kind")) s.jlm.kind = get_string(c["kind"], "jlm.kind");
        if (c.contains("edges")) s.jlm.edges = get_edges(c["edges"], "jlm.edges");
        if (c.contains("steps")) {
            const auto& steps = get_array(c["steps"], "jlm.steps");
            for (std::size_t n = 0; n < steps.size(); ++n) {
                s.jlm.steps.push_back(get_edges(steps[n], "jlm.steps[" + std::to_string(n) + "]"));
            }
        }
        if (c.contains("probability")) s.jlm.probability = get_double(c["probability"], "jlm.probability");
        if (c.contains("groups")) s.jlm.groups = get_groups(c["groups"], "jlm.groups");
    }

    if (j.contains("finite_range")) {
        const auto& c = j["finite_range"];
        allow_keys(c, "finite_range", {"kernel", "radius", "radii"});
        if (c.contains("kernel")) s.finite_range.kernel = get_string(c["kernel"], "finite_range.kernel");
        if (c.contains("radius")) s.finite_range.radius = get_double(c["radius"], "finite_range.radius");
        if (c.contains("radii")) s.finite_range.radii = get_doubles(c["radii"], "finite_range.radii");
    }

    if (j.contains("cucker_smale")) {
        const auto& c = j["cucker_smale"];
        allow_keys(c, "cucker_smale", {"K", "sigma", "beta", "h", "positions", "velocities"});
        auto& cs = s.cucker_smale;
        if (c.contains("K")) cs.K = get_double(c["K"], "cucker_smale.K");
        if (c.contains("sigma")) cs.sigma = get_double(c["sigma"], "cucker_smale.sigma");
        if (c.contains("beta")) cs.beta = get_double(c["beta"], "cucker_smale.beta");
        if (c.contains("h")) cs.h = get_double(c["h"], "cucker_smale.h");
        if (c.contains("positions")) cs.positions = get_points(c["positions"], "cucker_smale.positions");
        if (c.contains("velocities")) cs.velocities = get_points(c["velocities"], "cucker_smale.velocities");
    }

    if (j.contains("explicit_chain")) {
        const auto& c = j["explicit_chain"];
        allow_keys(c, "explicit_chain", {"file", "matrices"});
        if (c.contains("file") && c.contains("matrices")) {
            throw ValidationError("explicit_chain", "give either file or matrices, not both");
        }
        if (c.contains("file")) {
            s.explicit_chain.file = get_string(c["file"], "explicit_chain.file");
            std::filesystem::path p = *s.explicit_chain.file;
            if (p.is_relative()) p = base_dir / p;
            std::ifstream in(p);
            if (!in) throw ValidationError("explicit_chain.file", "cannot open " + p.string());
            s.explicit_chain.matrices = parse_matrix_list(in);
        }
        if (c.contains("matrices")) {
            const auto& ms = get_array(c["matrices"], "explicit_chain.matrices");
            for (std::size_t n = 0; n < ms.size(); ++n) {
                const std::string f = "explicit_chain.matrices[" + std::to_string(n) + "]";
                auto& block = s.explicit_chain.matrices.emplace_back();
                for (const auto& row : get_array(ms[n], f)) block.push_back(get_doubles(row, f));
            }
        }
    }

    // Defaults that depend on other sections.
    if (s.model == ModelKind::jlm && s.jlm.agents == 0) s.jlm.agents = s.initial_state.size();
    if (j.contains("horizon")) {
        s.horizon = get_unsigned(j["horizon"], "horizon");
    } else if (s.model == ModelKind::explicit_chain) {
        s.horizon = s.explicit_chain.matrices.size();
    }
    if (s.initial_state.empty() &&
        (s.model == ModelKind::jlm || s.model == ModelKind::explicit_chain)) {
        for (std::size_t i = 0; i < s.agents(); ++i) s.initial_state.push_back({static_cast<double>(i)});
    }

    validate(s);
    return s;
}

Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(
                                  std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw ParseError(line, e.what());
    }
    return scenario_from_json(j, base_dir);
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario", "cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str(), path.parent_path().empty() ? "." : path.parent_path());
}

void validate(const Scenario& s) {
    require(s.horizon >= 1, "horizon", "must be at least 1");
    {
        std::set<Analysis> seen;
        for (auto a : s.analyses) {
            require(seen.insert(a).second, "analyses", "'" + to_string(a) + "' listed twice");
        }
    }

    const Tolerances& t = s.tolerances;
    require(positive(t.row), "tolerances.row", "must be positive");
    require(positive(t.limit), "tolerances.limit", "must be positive");
    require(positive(t.leak), "tolerances.leak", "must be positive");
    require(positive(t.divergence), "tolerances.divergence", "must be positive");
    require(positive(t.bounded), "tolerances.bounded", "must be positive");
    require(positive(t.window) && t.window <= 1.0, "tolerances.window", "must lie in (0, 1]");
    require(positive(t.monitor), "tolerances.monitor", "must be positive");
    require(s.output.trajectory_stride >= 1, "output.trajectory_stride", "must be at least 1");

    const std::size_t n = s.agents();
    require(n >= 1, "agents", "scenario defines no agents");
    require(n <= kMaxAgentSetSize, "agents",
            "at most " + std::to_string(kMaxAgentSetSize) + " agents are supported");

    if (s.model != ModelKind::cucker_smale) {
        require(s.initial_state.size() == n, "initial_state",
                "has " + std::to_string(s.initial_state.size()) + " agents, the model has " +
                    std::to_string(n));
        const std::size_t dim = s.initial_state.front().size();
        for (const auto& row : s.initial_state) {
            require(!row.empty() && row.size() == dim, "initial_state",
                    "every agent needs the same positive number of coordinates");
            for (double v : row) require(std::isfinite(v), "initial_state", "values must be finite");
        }
    }

    switch (s.model) {
        case ModelKind::jlm: {
            const auto& c = s.jlm;
            require(std::find(std::begin(kJlmKinds), std::end(kJlmKinds), c.kind) != std::end(kJlmKinds),
                    "jlm.kind", "unknown schedule kind '" + c.kind + "'");
            check_edges(c.edges, n, "jlm.edges");
            for (const auto& step : c.steps) check_edges(step, n, "jlm.steps");
            check_groups(c.groups, n, "jlm.groups");
            if (c.kind == "periodic") require(!c.steps.empty(), "jlm.steps", "periodic schedule needs steps");
            if (c.kind == "groups") require(!c.groups.empty(), "jlm.groups", "groups schedule needs groups");
            if (c.kind == "random") {
                require(c.probability >= 0.0 && c.probability <= 1.0, "jlm.probability",
                        "must lie in [0, 1]");
            }
            break;
        }
        case ModelKind::finite_range: {
            const auto& c = s.finite_range;
            require(c.kernel == "indicator" || c.kernel == "tent", "finite_range.kernel",
                    "expected indicator or tent");
            require(positive(c.radius), "finite_range.radius", "must be positive");
            if (!c.radii.empty()) {
                require(c.radii.size() == n, "finite_range.radii",
                        "needs one radius per agent (" + std::to_string(n) + ")");
                for (double r : c.radii) require(positive(r), "finite_range.radii", "must be positive");
            }
            break;
        }
        case ModelKind::cucker_smale: {
            const auto& c = s.cucker_smale;
            require(positive(c.K), "cucker_smale.K", "must be positive");
            require(positive(c.sigma), "cucker_smale.sigma", "must be positive");
            require(std::isfinite(c.beta) && c.beta >= 0.0, "cucker_smale.beta", "must be nonnegative");
            require(positive(c.h), "cucker_smale.h", "must be positive");
            require(c.velocities.size() == c.positions.size(), "cucker_smale.velocities",
                    "needs one velocity per position");
            break;
        }
        case ModelKind::explicit_chain: {
            const auto& ms = s.explicit_chain.matrices;
            require(s.horizon <= ms.size(), "horizon",
                    "exceeds the " + std::to_string(ms.size()) + " supplied matrices");
            for (std::size_t k = 0; k < ms.size(); ++k) {
                const std::string f = "explicit_chain.matrices[" + std::to_string(k) + "]";
                require(ms[k].size() == n, f, "size differs from the first matrix");
                for (const auto& row : ms[k]) require(row.size() == n, f, "matrix is not square");
                try {
                    (void)validate_matrix(ms[k], t.row);
                } catch (const Error& e) {
                    throw ValidationError(f, e.what());
                }
            }
            break;
        }
    }
}

nlohmann::ordered_json to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["model"] = to_string(s.model);
    j["horizon"] = s.horizon;
    j["seed"] = s.seed;

    if (s.model != ModelKind::cucker_smale) {
        const bool scalar = std::all_of(s.initial_state.begin(), s.initial_state.end(),
                                        [](const auto& r) { return r.size() == 1; });
        auto init = nlohmann::ordered_json::array();
        for (const auto& row : s.initial_state) {
            if (scalar) init.push_back(row.front());
            else init.push_back(row);
        }
        j["initial_state"] = init;
    }

    auto analyses = nlohmann::ordered_json::array();
    for (auto a : s.analyses) analyses.push_back(to_string(a));
    j["analyses"] = analyses;

    const auto& t = s.tolerances;
    j["tolerances"] = {{"row", t.row},       {"limit", t.limit},     {"leak", t.leak},
                       {"divergence", t.divergence}, {"bounded", t.bounded}, {"window", t.window},
                       {"monitor", t.monitor}};
    j["output"] = {{"trajectory", s.output.trajectory},
                   {"trajectory_stride", s.output.trajectory_stride}};

    switch (s.model) {
        case ModelKind::jlm: {
            nlohmann::ordered_json c;
            c["agents"] = s.jlm.agents;
            c["kind"] = s.jlm.kind;
            if (!s.jlm.edges.empty()) c["edges"] = edges_json(s.jlm.edges);
            if (!s.jlm.steps.empty()) {
                auto steps = nlohmann::ordered_json::array();
                for (const auto& st : s.jlm.steps) steps.push_back(edges_json(st));
                c["steps"] = steps;
            }
            c["probability"] = s.jlm.probability;
            if (!s.jlm.groups.empty()) c["groups"] = groups_json(s.jlm.groups);
            j["jlm"] = c;
            break;
        }
        case ModelKind::finite_range: {
            nlohmann::ordered_json c;
            c["kernel"] = s.finite_range.kernel;
            c["radius"] = s.finite_range.radius;
            if (!s.finite_range.radii.empty()) c["radii"] = s.finite_range.radii;
            j["finite_range"] = c;
            break;
        }
        case ModelKind::cucker_smale: {
            const auto& cs = s.cucker_smale;
            nlohmann::ordered_json c;
            c["K"] = cs.K;
            c["sigma"] = cs.sigma;
            c["beta"] = cs.beta;
            c["h"] = cs.h;
            c["positions"] = cs.positions;
            c["velocities"] = cs.velocities;
            j["cucker_smale"] = c;
            break;
        }
        case ModelKind::explicit_chain: {
            nlohmann::ordered_json c;
            if (s.explicit_chain.file) c["file"] = *s.explicit_chain.file;
            else c["matrices"] = s.explicit_chain.matrices;
            j["explicit_chain"] = c;
            break;
        }
    }
    return j;
}

std::string serialize(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

}  // namespace ergo::cli
