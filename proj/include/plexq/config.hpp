// config.hpp: scenario configuration documents
//
// A config is a JSON object. Physical parameters start from the chosen
// parameter set and are overridden key by key from "params"; everything
// else has a per-scenario default. Overrides from the command line are
// applied to the document before validation, so one code path checks both.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plexq/entanglement.hpp"
#include "plexq/manifold.hpp"
#include "plexq/parameters.hpp"
#include "plexq/spectrum.hpp"

namespace plexq {

// Invalid document. path() is a JSON pointer to the offending value.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& message);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class Scenario { spectrum, dynamics_cw, entangle, manifold };
enum class SolverChoice { lindblad, nonhermitian, both };
enum class ManifoldModes { homogeneous, inhomogeneous, both };

const char* scenario_name(Scenario s);
const char* solver_choice_name(SolverChoice s);

struct SteadyStateSettings {
    double window{100.0};  // fs
    double tol{1e-2};
    double smoothing{-1.0};  // fs; negative = one carrier period
};

struct EntangleSettings {
    std::size_t initial_dot{1};
    double sample_dt{1.0};  // fs between concurrence samples
    LostNormHandling norm_handling{LostNormHandling::ground_padding};
};

struct ManifoldSettings {
    ManifoldModes modes{ManifoldModes::both};
    double coupling_mean{0.0167};
    double coupling_std{0.0167};
    double sample_dt{1.0};
};

struct ScenarioConfig {
    Scenario scenario{Scenario::spectrum};
    int parameter_set{1};
    ParameterSet params;
    SolverChoice solver{SolverChoice::both};
    std::size_t n_pl{5};
    std::filesystem::path output_dir{"out"};
    std::uint64_t seed{2};
    std::size_t record_stride{10};
    double dt{0.005};
    double t_end{2500.0};
    SpectrumWindow window;
    double spectrum_extension{500.0};
    double spectrum_max_t_end{10000.0};
    double decay_floor{1e-6};
    SteadyStateSettings steady_state;
    EntangleSettings entangle;
    ManifoldSettings manifold;

    std::size_t n_dots() const { return params.n_dots(); }
    std::vector<Solver> solvers() const;
};

// Throws ConfigError.
ScenarioConfig parse_config(const nlohmann::json& doc);
nlohmann::json read_config_document(const std::filesystem::path& path);
ScenarioConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration, suitable for the run manifest. Parsing the
// result reproduces the same configuration.
nlohmann::json to_json(const ScenarioConfig& config);

// Optional "sweep": {"axis": ..., "values": [...]} block of a document.
struct SweepSpec {
    std::string axis;
    std::vector<double> values;
};

// Removes and returns the sweep block, if any. Throws ConfigError.
std::optional<SweepSpec> take_sweep(nlohmann::json& doc);

// Sets a numeric field addressed by a dotted path ("gamma2_star",
// "params.E_L", "spectrum.omega_min"). Bare physical names refer to
// "params"; "g" sets every coupling.
void set_numeric_field(nlohmann::json& doc, const std::string& path, double value);

}  // namespace plexq
