// runner.hpp: scenario execution, output files and run manifests

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plexq/config.hpp"

namespace plexq {

inline constexpr const char* kVersion = "0.1.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 1;
inline constexpr int numerical = 2;
inline constexpr int io = 3;
}  // namespace exit_code

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OutputFile {
    std::string name;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes{0};
};

struct RunReport {
    int exit_code{exit_code::ok};
    std::string message;
    std::filesystem::path output_dir;
    std::vector<OutputFile> files;
    nlohmann::json results = nlohmann::json::object();
    double wall_time{0.0};  // s
};

// Runs one scenario into config.output_dir and writes manifest.json there.
// Failures are reported through the exit code, never thrown.
RunReport run(const ScenarioConfig& config);

struct SweepEntry {
    double value{0.0};
    std::filesystem::path output_dir;
    RunReport report;
};

struct SweepReport {
    int exit_code{exit_code::ok};
    std::vector<SweepEntry> entries;
};

// One independent run per value, each in <output_dir>/<axis>_<value>/.
// A sweep_manifest.json in <output_dir> lists the status of every value.
SweepReport sweep(const nlohmann::json& doc, const std::string& axis, const std::vector<double>& values);

std::string sha256_hex(const std::filesystem::path& file);

// Directory-safe rendering of a sweep value.
std::string value_suffix(double value);

}  // namespace plexq
