#include "plexq/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace plexq {

using nlohmann::json;

ConfigError::ConfigError(const std::string& path, const std::string& message)
    : std::runtime_error("config error at " + (path.empty() ? std::string("/") : path) + ": " + message),
      path_(path.empty() ? "/" : path) {}

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::spectrum: return "spectrum";
        case Scenario::dynamics_cw: return "dynamics-cw";
        case Scenario::entangle: return "entangle";
        case Scenario::manifold: return "manifold-N";
    }
    return "?";
}

const char* solver_choice_name(SolverChoice s) {
    switch (s) {
        case SolverChoice::lindblad: return "lindblad";
        case SolverChoice::nonhermitian: return "nonhermitian";
        case SolverChoice::both: return "both";
    }
    return "?";
}

std::vector<Solver> ScenarioConfig::solvers() const {
    switch (solver) {
        case SolverChoice::lindblad: return {Solver::lindblad};
        case SolverChoice::nonhermitian: return {Solver::nonhermitian};
        case SolverChoice::both: break;
    }
    return {Solver::lindblad, Solver::nonhermitian};
}

namespace {

const char* modes_name(ManifoldModes m) {
    switch (m) {
        case ManifoldModes::homogeneous: return "homogeneous";
        case ManifoldModes::inhomogeneous: return "inhomogeneous";
        case ManifoldModes::both: return "both";
    }
    return "?";
}

const char* norm_handling_name(LostNormHandling h) {
    return h == LostNormHandling::ground_padding ? "ground_padding" : "renormalized";
}

const std::set<std::string> kParamKeys{"omega0", "omega_pl", "omega_L", "g",     "gamma1", "gamma2_star", "gamma_pl",
                                       "d0",     "d_pl",     "E_L",     "t_c",   "tau_L",  "n_med",       "cw_mode"};

// Typed access to one JSON object, remembering which keys were consumed.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return obj_.contains(key); }
    std::string path(const std::string& key) const { return path_ + "/" + key; }

    const json& at(const std::string& key) {
        used_.insert(key);
        return obj_.at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(path(key), "expected a finite number");
        return x;
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9.0e15) return static_cast<std::int64_t>(x);
        }
        throw ConfigError(path(key), "expected an integer");
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }

    Reader object(const std::string& key) {
        static const json empty = json::object();
        return has(key) ? Reader(at(key), path(key)) : Reader(empty, path(key));
    }

    void finish() const {
        for (const auto& item : obj_.items()) {
            if (!used_.count(item.key())) throw ConfigError(path(item.key()), "unknown key");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

Scenario parse_scenario(const std::string& name, const std::string& path) {
    if (name == "spectrum") return Scenario::spectrum;
    if (name == "dynamics-cw") return Scenario::dynamics_cw;
    if (name == "entangle") return Scenario::entangle;
    if (name == "manifold-N") return Scenario::manifold;
    throw ConfigError(path, "unknown scenario '" + name + "' (spectrum, dynamics-cw, entangle, manifold-N)");
}

SolverChoice parse_solver(const std::string& name, const std::string& path) {
    if (name == "lindblad") return SolverChoice::lindblad;
    if (name == "nonhermitian") return SolverChoice::nonhermitian;
    if (name == "both") return SolverChoice::both;
    throw ConfigError(path, "unknown solver '" + name + "' (lindblad, nonhermitian, both)");
}

void require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) throw ConfigError(path, message);
}

void read_params(Reader& r, ParameterSet& p, std::size_t n_dots) {
    p.omega0 = r.number("omega0", p.omega0);
    p.omega_pl = r.number("omega_pl", p.omega_pl);
    p.omega_L = r.number("omega_L", p.omega_L);
    if (r.has("g")) {
        const json& g = r.at("g");
        if (g.is_number()) {
            p.g.assign(n_dots, g.get<double>());
        } else if (g.is_array()) {
            require(g.size() == n_dots, r.path("g"),
                    "coupling list has " + std::to_string(g.size()) + " entries for " + std::to_string(n_dots) + " dots");
            p.g.clear();
            for (std::size_t j = 0; j < g.size(); ++j) {
                require(g[j].is_number(), r.path("g") + "/" + std::to_string(j), "expected a number");
                p.g.push_back(g[j].get<double>());
            }
        } else {
            throw ConfigError(r.path("g"), "expected a number or a list of numbers");
        }
    }
    p.gamma1 = r.number("gamma1", p.gamma1);
    p.gamma2_star = r.number("gamma2_star", p.gamma2_star);
    p.gamma_pl = r.number("gamma_pl", p.gamma_pl);
    p.d0 = r.number("d0", p.d0);
    p.d_pl = r.number("d_pl", p.d_pl);
    p.E_L = r.number("E_L", p.E_L);
    p.t_c = r.number("t_c", p.t_c);
    p.tau_L = r.number("tau_L", p.tau_L);
    p.n_med = r.number("n_med", p.n_med);
    p.cw_mode = r.boolean("cw_mode", p.cw_mode);
    r.finish();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("/params", e.what());
    }
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
    Reader top(doc, "");
    ScenarioConfig c;
    require(top.has("scenario"), "/scenario", "missing required key");
    c.scenario = parse_scenario(top.string("scenario", ""), "/scenario");
    top.string("description", "");

    const bool cw = c.scenario == Scenario::dynamics_cw;
    const bool manifold = c.scenario == Scenario::manifold;
    const bool entangle = c.scenario == Scenario::entangle;

    c.parameter_set = static_cast<int>(top.integer("parameter_set", manifold || entangle ? 2 : 1));
    require(c.parameter_set == 1 || c.parameter_set == 2, "/parameter_set", "must be 1 or 2");

    std::int64_t n_dots = top.integer("n_dots", manifold ? 50 : entangle ? 2 : 1);
    if (!top.has("n_dots") && doc.contains("params") && doc["params"].is_object() && doc["params"].contains("g") &&
        doc["params"]["g"].is_array()) {
        n_dots = static_cast<std::int64_t>(doc["params"]["g"].size());
    }
    require(n_dots >= 1 && n_dots <= 64, "/n_dots", "must be between 1 and 64");
    if (entangle) require(n_dots == 2, "/n_dots", "the entangle scenario needs exactly two dots");
    if (manifold) require(n_dots >= 2, "/n_dots", "manifold-N needs at least two dots");
    if (!manifold) require(n_dots <= 4, "/n_dots", "full-space scenarios support at most 4 dots");

    c.params = parameter_set(c.parameter_set, static_cast<std::size_t>(n_dots));
    if (cw) c.params.cw_mode = true;
    {
        Reader pr = top.object("params");
        read_params(pr, c.params, static_cast<std::size_t>(n_dots));
    }

    const std::string solver_default = manifold ? "nonhermitian" : "both";
    c.solver = parse_solver(top.string("solver", solver_default), "/solver");
    if (manifold) {
        require(c.solver == SolverChoice::nonhermitian, "/solver",
                "manifold-N is non-Hermitian only; a Lindblad run at N = 50 is out of scale");
    }

    c.n_pl = static_cast<std::size_t>(top.integer("n_pl", cw ? 15 : 5));
    require(c.n_pl >= 2 && c.n_pl <= 64, "/n_pl", "must be between 2 and 64");
    c.output_dir = top.string("output_dir", c.output_dir.string());
    const std::int64_t seed = top.integer("seed", static_cast<std::int64_t>(c.seed));
    require(seed >= 0, "/seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    const std::int64_t stride = top.integer("record_stride", static_cast<std::int64_t>(c.record_stride));
    require(stride >= 1, "/record_stride", "must be >= 1");
    c.record_stride = static_cast<std::size_t>(stride);
    c.dt = top.number("dt", c.dt);
    require(c.dt > 0.0, "/dt", "must be > 0");
    c.t_end = top.number("t_end", c.t_end);
    require(c.t_end > 0.0, "/t_end", "must be > 0");

    {
        Reader s = top.object("spectrum");
        c.window.omega_min = s.number("omega_min", c.window.omega_min);
        c.window.omega_max = s.number("omega_max", c.window.omega_max);
        c.window.d_omega = s.number("d_omega", c.window.d_omega);
        c.spectrum_extension = s.number("extension", c.spectrum_extension);
        c.spectrum_max_t_end = s.number("max_t_end", c.spectrum_max_t_end);
        c.decay_floor = s.number("decay_floor", c.decay_floor);
        s.finish();
        require(c.window.omega_min > 0.0 && c.window.omega_max > c.window.omega_min, "/spectrum",
                "need 0 < omega_min < omega_max");
        require(c.window.d_omega > 0.0, "/spectrum/d_omega", "must be > 0");
        require(c.spectrum_extension > 0.0, "/spectrum/extension", "must be > 0");
        require(c.spectrum_max_t_end >= c.t_end, "/spectrum/max_t_end", "must be >= t_end");
        require(c.decay_floor > 0.0, "/spectrum/decay_floor", "must be > 0");
    }
    {
        Reader s = top.object("steady_state");
        c.steady_state.window = s.number("window", c.steady_state.window);
        c.steady_state.tol = s.number("tol", c.steady_state.tol);
        c.steady_state.smoothing = s.number("smoothing", c.steady_state.smoothing);
        s.finish();
        require(c.steady_state.window > 0.0, "/steady_state/window", "must be > 0");
        require(c.steady_state.tol > 0.0, "/steady_state/tol", "must be > 0");
    }
    {
        Reader s = top.object("entangle");
        const std::int64_t dot = s.integer("initial_dot", 1);
        require(dot >= 1 && dot <= n_dots, "/entangle/initial_dot", "must name one of the dots");
        c.entangle.initial_dot = static_cast<std::size_t>(dot);
        c.entangle.sample_dt = s.number("sample_dt", c.entangle.sample_dt);
        require(c.entangle.sample_dt > 0.0, "/entangle/sample_dt", "must be > 0");
        const std::string norm = s.string("concurrence_norm", "ground_padding");
        if (norm == "ground_padding") {
            c.entangle.norm_handling = LostNormHandling::ground_padding;
        } else if (norm == "renormalized") {
            c.entangle.norm_handling = LostNormHandling::renormalized;
        } else {
            throw ConfigError("/entangle/concurrence_norm", "expected 'ground_padding' or 'renormalized'");
        }
        s.finish();
    }
    {
        Reader s = top.object("manifold");
        const std::string modes = s.string("modes", "both");
        if (modes == "homogeneous") {
            c.manifold.modes = ManifoldModes::homogeneous;
        } else if (modes == "inhomogeneous") {
            c.manifold.modes = ManifoldModes::inhomogeneous;
        } else if (modes == "both") {
            c.manifold.modes = ManifoldModes::both;
        } else {
            throw ConfigError("/manifold/modes", "expected 'homogeneous', 'inhomogeneous' or 'both'");
        }
        c.manifold.coupling_mean = s.number("coupling_mean", c.params.g.front());
        c.manifold.coupling_std = s.number("coupling_std", c.manifold.coupling_std);
        c.manifold.sample_dt = s.number("sample_dt", c.manifold.sample_dt);
        s.finish();
        require(c.manifold.coupling_std >= 0.0, "/manifold/coupling_std", "must be >= 0");
        require(c.manifold.sample_dt > 0.0, "/manifold/sample_dt", "must be > 0");
    }
    top.finish();

    switch (c.scenario) {
        case Scenario::spectrum:
            require(!c.params.cw_mode, "/params/cw_mode", "the spectrum scenario needs a pulsed drive");
            require(c.params.E_L != 0.0, "/params/E_L", "the spectrum scenario needs a drive");
            break;
        case Scenario::dynamics_cw:
            require(c.params.cw_mode, "/params/cw_mode", "the dynamics-cw scenario is continuous-wave");
            require(c.params.E_L != 0.0, "/params/E_L", "the dynamics-cw scenario needs a drive");
            break;
        case Scenario::entangle: break;
        case Scenario::manifold:
            require(c.params.E_L == 0.0, "/params/E_L", "the single-excitation manifold is closed only without drive");
            break;
    }
    return c;
}

json read_config_document(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    try {
        return json::parse(in, nullptr, true, false);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + " is not valid JSON: " + e.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_config_document(path));
}

json to_json(const ScenarioConfig& c) {
    const ParameterSet& p = c.params;
    json doc;
    doc["scenario"] = scenario_name(c.scenario);
    doc["parameter_set"] = c.parameter_set;
    doc["solver"] = solver_choice_name(c.solver);
    doc["n_dots"] = c.n_dots();
    doc["n_pl"] = c.n_pl;
    doc["output_dir"] = c.output_dir.string();
    doc["seed"] = c.seed;
    doc["record_stride"] = c.record_stride;
    doc["dt"] = c.dt;
    doc["t_end"] = c.t_end;
    doc["params"] = {{"omega0", p.omega0},   {"omega_pl", p.omega_pl},       {"omega_L", p.omega_L},
                     {"g", p.g},             {"gamma1", p.gamma1},           {"gamma2_star", p.gamma2_star},
                     {"gamma_pl", p.gamma_pl}, {"d0", p.d0},                 {"d_pl", p.d_pl},
                     {"E_L", p.E_L},         {"t_c", p.t_c},                 {"tau_L", p.tau_L},
                     {"n_med", p.n_med},     {"cw_mode", p.cw_mode}};
    doc["spectrum"] = {{"omega_min", c.window.omega_min}, {"omega_max", c.window.omega_max},
                       {"d_omega", c.window.d_omega},     {"extension", c.spectrum_extension},
                       {"max_t_end", c.spectrum_max_t_end}, {"decay_floor", c.decay_floor}};
    doc["steady_state"] = {{"window", c.steady_state.window},
                           {"tol", c.steady_state.tol},
                           {"smoothing", c.steady_state.smoothing}};
    doc["entangle"] = {{"initial_dot", c.entangle.initial_dot},
                       {"sample_dt", c.entangle.sample_dt},
                       {"concurrence_norm", norm_handling_name(c.entangle.norm_handling)}};
    doc["manifold"] = {{"modes", modes_name(c.manifold.modes)},
                       {"coupling_mean", c.manifold.coupling_mean},
                       {"coupling_std", c.manifold.coupling_std},
                       {"sample_dt", c.manifold.sample_dt}};
    return doc;
}

std::optional<SweepSpec> take_sweep(json& doc) {
    if (!doc.is_object() || !doc.contains("sweep")) return std::nullopt;
    const json block = doc["sweep"];
    doc.erase("sweep");
    Reader r(block, "/sweep");
    SweepSpec spec;
    require(r.has("axis"), "/sweep/axis", "missing required key");
    spec.axis = r.string("axis", "");
    require(r.has("values"), "/sweep/values", "missing required key");
    const json& values = r.at("values");
    require(values.is_array() && !values.empty(), "/sweep/values", "expected a non-empty list of numbers");
    for (std::size_t k = 0; k < values.size(); ++k) {
        require(values[k].is_number(), "/sweep/values/" + std::to_string(k), "expected a number");
        spec.values.push_back(values[k].get<double>());
    }
    r.finish();
    return spec;
}

void set_numeric_field(json& doc, const std::string& path, double value) {
    if (!doc.is_object()) throw ConfigError("", "expected an object");
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    if (parts.empty() || path.empty()) throw ConfigError("", "empty parameter path");
    if (parts.size() == 1 && kParamKeys.count(parts[0])) parts.insert(parts.begin(), "params");

    std::string pointer;
    json* node = &doc;
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
        pointer += "/" + parts[k];
        if (!node->contains(parts[k])) (*node)[parts[k]] = json::object();
        node = &(*node)[parts[k]];
        if (!node->is_object()) throw ConfigError(pointer, "expected an object");
    }
    const std::string& leaf = parts.back();
    pointer += "/" + leaf;
    if (leaf == "cw_mode") throw ConfigError(pointer, "not a numeric field");
    if (parts.size() == 2 && parts[0] == "params" && leaf == "g" && node->contains("g") && (*node)["g"].is_array()) {
        const std::size_t n = (*node)["g"].size();
        (*node)["g"] = json(std::vector<double>(n, value));
        return;
    }
    const bool integral = value == std::floor(value) && std::abs(value) < 9.0e15;
    const std::set<std::string> integer_keys{"parameter_set", "n_dots", "n_pl", "seed", "record_stride", "initial_dot"};
    if (integer_keys.count(leaf)) {
        if (!integral) throw ConfigError(pointer, "expected an integer");
        (*node)[leaf] = static_cast<std::int64_t>(value);
    } else {
        (*node)[leaf] = value;
    }
}

}  // namespace plexq
