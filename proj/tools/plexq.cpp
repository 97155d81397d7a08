// plexq: command-line front end for the scenario runner
//
//   plexq run   --preset fig1 [--out DIR] [--seed N] [--solver NAME] [--set 1|2]
//   plexq sweep --config my.json --axis gamma2_star --values 0,0.00127,0.00508
//   plexq presets
//
// Precedence, lowest first: parameter-set defaults, config file, --param,
// then the dedicated flags.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plexq/config.hpp"
#include "plexq/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    std::string config;
    std::string preset;
    std::string out;
    long long seed{-1};
    std::string solver;
    int set{0};
    std::vector<std::string> params;
};

fs::path preset_dir() {
    if (const char* env = std::getenv("PLEXQ_PRESET_DIR")) return env;
    return PLEXQ_PRESET_DIR;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
    auto* cfg = cmd->add_option("-c,--config", o.config, "scenario config file (JSON)");
    auto* pre = cmd->add_option("-p,--preset", o.preset, "bundled preset name, e.g. fig1");
    cfg->excludes(pre);
    cmd->add_option("-o,--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed for sampled couplings")->check(CLI::NonNegativeNumber);
    cmd->add_option("--solver", o.solver, "lindblad, nonhermitian or both")
        ->check(CLI::IsMember({"lindblad", "nonhermitian", "both"}));
    cmd->add_option("--set", o.set, "parameter set (1 or 2)")->check(CLI::IsMember({1, 2}));
    cmd->add_option("--param", o.params, "numeric override KEY=VALUE (repeatable), e.g. gamma2_star=0");
}

json build_document(const CommonOptions& o) {
    json doc;
    if (!o.preset.empty()) {
        const fs::path path = preset_dir() / (o.preset + ".json");
        if (!fs::exists(path)) throw plexq::ConfigError("", "no preset named '" + o.preset + "' in " + preset_dir().string());
        doc = plexq::read_config_document(path);
    } else if (!o.config.empty()) {
        doc = plexq::read_config_document(o.config);
    } else {
        throw plexq::ConfigError("", "give --config PATH or --preset NAME");
    }
    for (const auto& kv : o.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw plexq::ConfigError("", "--param expects KEY=VALUE, got '" + kv + "'");
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(kv.substr(eq + 1), &used);
            if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
        } catch (const std::exception&) {
            throw plexq::ConfigError("", "--param value is not a number: '" + kv + "'");
        }
        plexq::set_numeric_field(doc, kv.substr(0, eq), value);
    }
    if (o.set != 0) doc["parameter_set"] = o.set;
    if (!o.solver.empty()) doc["solver"] = o.solver;
    if (o.seed >= 0) doc["seed"] = o.seed;
    if (!o.out.empty()) doc["output_dir"] = o.out;
    return doc;
}

void print_report(const plexq::RunReport& r) {
    if (r.exit_code != plexq::exit_code::ok) {
        std::cerr << "error: " << r.message << '\n';
        return;
    }
    std::cout << "wrote " << r.files.size() << " files to " << r.output_dir.string() << " in " << r.wall_time << " s\n";
    std::cout << r.results.dump(2) << '\n';
}

int report_sweep(const plexq::SweepReport& result, const std::string& axis) {
    for (const auto& e : result.entries) {
        std::cout << axis << " = " << e.value << ": "
                  << (e.report.exit_code == 0 ? "ok" : "failed (" + e.report.message + ")") << "  -> "
                  << e.output_dir.string() << '\n';
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"plexq: quantum dots coupled to a plasmon, Lindblad vs non-Hermitian dynamics"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    bool dry_run = false;
    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    add_common(run_cmd, run_opts);
    run_cmd->add_flag("--dry-run", dry_run, "print the resolved configuration and exit");

    CommonOptions sweep_opts;
    std::string axis;
    std::vector<double> values;
    auto* sweep_cmd = app.add_subcommand("sweep", "independent runs over one numeric parameter");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", axis, "parameter path, e.g. gamma2_star or spectrum.omega_min")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

    auto* presets_cmd = app.add_subcommand("presets", "list bundled presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : plexq::exit_code::config;
    }

    try {
        if (*presets_cmd) {
            std::vector<std::string> names;
            for (const auto& entry : fs::directory_iterator(preset_dir())) {
                if (entry.path().extension() == ".json" && entry.path().stem() != "schema") {
                    names.push_back(entry.path().stem().string());
                }
            }
            std::sort(names.begin(), names.end());
            for (const auto& n : names) {
                const json doc = plexq::read_config_document(preset_dir() / (n + ".json"));
                std::cout << n << "  " << doc.value("description", "") << '\n';
            }
            return 0;
        }
        if (*run_cmd) {
            json doc = build_document(run_opts);
            if (const auto block = plexq::take_sweep(doc)) {
                axis = block->axis;
                values = block->values;
                if (dry_run) {
                    std::cout << "sweep " << axis << " over " << values.size() << " values of\n"
                              << plexq::to_json(plexq::parse_config(doc)).dump(2) << '\n';
                    return 0;
                }
                return report_sweep(plexq::sweep(doc, axis, values), axis);
            }
            const plexq::ScenarioConfig config = plexq::parse_config(doc);
            if (dry_run) {
                std::cout << plexq::to_json(config).dump(2) << '\n';
                return 0;
            }
            const auto report = plexq::run(config);
            print_report(report);
            return report.exit_code;
        }
        json doc = build_document(sweep_opts);
        plexq::take_sweep(doc);
        return report_sweep(plexq::sweep(doc, axis, values), axis);
    } catch (const plexq::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return plexq::exit_code::config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return plexq::exit_code::io;
    }
}
