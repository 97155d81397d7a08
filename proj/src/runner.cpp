#include "plexq/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <sstream>

#include <Eigen/Core>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include "plexq/constants.hpp"
#include "plexq/dynamics.hpp"
#include "plexq/entanglement.hpp"
#include "plexq/errors.hpp"
#include "plexq/manifold.hpp"
#include "plexq/spectrum.hpp"

namespace plexq {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sha256_hex(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw IoError("SHA-256 unavailable");
    }
    std::vector<char> buffer(1 << 16);
    while (in) {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 0xf];
    }
    return out;
}

std::string value_suffix(double value) {
    std::string s = format_number(value);
    for (char& c : s) {
        if (c == '+') c = 'p';
    }
    return s;
}

namespace {

class OutputWriter {
public:
    explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = dir_ / name;
        {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot open " + path.string() + " for writing");
            body(out);
            out.flush();
            if (!out) throw IoError("write to " + path.string() + " failed");
        }
        files_.push_back({name, sha256_hex(path), fs::file_size(path)});
    }

    const std::vector<OutputFile>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<OutputFile> files_;
};

void write_concurrence_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& c) {
    os << "t_fs,C_pair_or_avg\n";
    for (std::size_t k = 0; k < t.size(); ++k) os << format_number(t[k]) << ',' << format_number(c[k]) << '\n';
}

json diagnostics_json(const Trajectory& traj) {
    if (traj.solver != Solver::lindblad) {
        double max_norm = 0.0;
        for (double n : traj.norm_or_trace) max_norm = std::max(max_norm, n);
        return {{"max_norm", max_norm}, {"final_norm", traj.norm_or_trace.back()}};
    }
    return {{"max_trace_error", traj.diagnostics.max_trace_error},
            {"max_hermiticity_error", traj.diagnostics.max_hermiticity_error},
            {"min_eigenvalue", traj.diagnostics.min_eigenvalue}};
}

PropagationOptions propagation_options(const ScenarioConfig& c) {
    PropagationOptions o;
    o.t_end = c.t_end;
    o.dt = c.dt;
    o.record.stride = c.record_stride;
    return o;
}

json run_spectrum(const ScenarioConfig& c, OutputWriter& out) {
    const BasisDescriptor basis(c.n_dots(), c.n_pl);
    const DriveSpec drive = drive_from(c.params);
    SpectrumOptions so;
    so.window = c.window;
    so.t_end = c.t_end;
    so.dt = c.dt;
    so.record_stride = c.record_stride;
    so.extension = c.spectrum_extension;
    so.max_t_end = c.spectrum_max_t_end;
    so.polarizability.n_med = c.params.n_med;
    so.polarizability.decay_floor = c.decay_floor;

    json results = json::object();
    for (Solver solver : c.solvers()) {
        const Trajectory traj = spectrum_trajectory(c.params, basis, solver, drive, so);
        const Spectrum spec = spectrum_from_trajectory(traj, drive, so);
        const std::string tag = solver_name(solver);
        out.write("trajectory_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
        out.write("spectrum_" + tag + ".csv", [&](std::ostream& os) { write_spectrum_csv(os, spec); });
        const DipFeatures dip = analyze_dip(spec, c.params.omega0, 0.01);
        results[tag] = {{"t_end_fs", spec.t_end},
                        {"peak_sigma_cm2", dip.peak_sigma},
                        {"dip_found", dip.found},
                        {"dip_omega_eV", dip.dip_omega},
                        {"dip_sigma_cm2", dip.dip_sigma},
                        {"dip_depth_cm2", dip.depth()},
                        {"masked_points", std::count(spec.masked.begin(), spec.masked.end(), 1)},
                        {"diagnostics", diagnostics_json(traj)}};
    }
    return results;
}

json run_dynamics_cw(const ScenarioConfig& c, OutputWriter& out) {
    const BasisDescriptor basis(c.n_dots(), c.n_pl);
    const DriveSpec drive = drive_from(c.params);
    const PropagationOptions opts = propagation_options(c);

    json results = json::object();
    for (Solver solver : c.solvers()) {
        const QuantumState start = solver == Solver::lindblad ? QuantumState{ground_density_matrix(basis)}
                                                              : QuantumState{basis_wave_packet(basis, 0)};
        const Trajectory traj = propagate(start, c.params, basis, solver, drive, opts);
        const std::string tag = solver_name(solver);
        out.write("trajectory_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });

        json r = {{"diagnostics", diagnostics_json(traj)}};
        SteadyStateOptions ss;
        ss.dipole = false;
        ss.norm = false;
        ss.smoothing = c.steady_state.smoothing >= 0.0 ? c.steady_state.smoothing
                                                       : 2.0 * constants::pi * constants::hbar / c.params.omega_L;
        const auto t_ss = detect_steady_state(traj, c.steady_state.window, c.steady_state.tol, ss);
        r["steady_state_fs"] = t_ss ? json(*t_ss) : json(nullptr);
        r["smoothing_fs"] = ss.smoothing;

        // means over the final steady-state window
        const double t_last = traj.time.back();
        std::vector<double> dots(traj.n_dots(), 0.0);
        double plasmon = 0.0;
        std::size_t count = 0;
        for (std::size_t k = 0; k < traj.size(); ++k) {
            if (traj.time[k] < t_last - c.steady_state.window) continue;
            for (std::size_t j = 0; j < dots.size(); ++j) dots[j] += traj.dot_population[j][k];
            plasmon += traj.plasmon_population[k];
            ++count;
        }
        for (double& d : dots) d /= static_cast<double>(count);
        r["final_window_dot_population"] = dots;
        r["final_window_plasmon_population"] = plasmon / static_cast<double>(count);
        r["final_norm_or_trace"] = traj.norm_or_trace.back();
        results[tag] = r;
    }
    return results;
}

json run_entangle(const ScenarioConfig& c, OutputWriter& out) {
    const BasisDescriptor basis(c.n_dots(), c.n_pl);
    const DriveSpec drive = drive_from(c.params);
    PropagationOptions opts = propagation_options(c);
    opts.record.keep_states = true;
    const double record_dt = c.dt * static_cast<double>(c.record_stride);
    opts.record.state_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c.entangle.sample_dt / record_dt)));

    const WavePacket excited = dot_excited_wave_packet(basis, c.entangle.initial_dot);
    json results = json::object();
    for (Solver solver : c.solvers()) {
        const QuantumState start = solver == Solver::lindblad ? QuantumState{pure_density_matrix(excited)}
                                                              : QuantumState{excited};
        const Trajectory traj = propagate(start, c.params, basis, solver, drive, opts);
        std::vector<double> t, conc;
        for (const auto& snap : traj.snapshots) {
            t.push_back(snap.t);
            conc.push_back(wootters_concurrence(reduce_to_dots(snap.state, c.entangle.norm_handling)));
        }
        const std::string tag = solver_name(solver);
        out.write("trajectory_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
        out.write("concurrence_" + tag + ".csv", [&](std::ostream& os) { write_concurrence_csv(os, t, conc); });
        const auto peak = std::max_element(conc.begin(), conc.end());
        results[tag] = {{"peak_concurrence", *peak},
                        {"peak_time_fs", t[static_cast<std::size_t>(peak - conc.begin())]},
                        {"diagnostics", diagnostics_json(traj)}};
    }
    return results;
}

json run_manifold(const ScenarioConfig& c, OutputWriter& out) {
    std::vector<CouplingMode> modes;
    if (c.manifold.modes != ManifoldModes::inhomogeneous) modes.push_back(CouplingMode::homogeneous);
    if (c.manifold.modes != ManifoldModes::homogeneous) modes.push_back(CouplingMode::inhomogeneous);

    ManifoldScenarioOptions mo;
    mo.n_dots = c.n_dots();
    mo.coupling_mean = c.manifold.coupling_mean;
    mo.coupling_std = c.manifold.coupling_std;
    mo.t_end = c.t_end;
    mo.sample_dt = c.manifold.sample_dt;
    mo.initial_dot = c.entangle.initial_dot;

    json results = json::object();
    for (CouplingMode mode : modes) {
        const ManifoldRun run = run_manifold_scenario(c.params, mode, c.seed, mo);
        const std::string tag = coupling_mode_name(mode);
        out.write("trajectory_" + tag + ".csv", [&](std::ostream& os) { write_trajectory_csv(os, run.trajectory); });
        out.write("concurrence_" + tag + ".csv",
                  [&](std::ostream& os) { write_concurrence_csv(os, run.trajectory.time, run.avg_concurrence); });
        const auto peak = std::max_element(run.avg_concurrence.begin(), run.avg_concurrence.end());
        results[tag] = {{"seed", mode == CouplingMode::inhomogeneous ? json(run.seed) : json(nullptr)},
                        {"couplings", run.couplings},
                        {"negative_couplings", run.has_negative_couplings},
                        {"rk4_fallback", run.used_fallback},
                        {"peak_average_concurrence", *peak},
                        {"peak_time_fs", run.trajectory.time[static_cast<std::size_t>(peak - run.avg_concurrence.begin())]}};
    }
    return results;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json versions_json() {
    return {{"plexq", kVersion},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"openssl", OPENSSL_VERSION_TEXT},
            {"compiler", __VERSION__}};
}

json constants_json() {
    return {{"hbar_eV_fs", constants::hbar},
            {"debye_au_to_eV", constants::debye_au_to_eV},
            {"speed_of_light_m_s", constants::speed_of_light},
            {"eps0_F_m", constants::eps0},
            {"au_field_V_m", constants::au_field_to_Vpm},
            {"joule_per_eV", constants::joule_per_eV}};
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace

RunReport run(const ScenarioConfig& config) {
    RunReport report;
    report.output_dir = config.output_dir;
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::unique_ptr<OutputWriter> writer;
    try {
        writer = std::make_unique<OutputWriter>(config.output_dir);
        switch (config.scenario) {
            case Scenario::spectrum: report.results = run_spectrum(config, *writer); break;
            case Scenario::dynamics_cw: report.results = run_dynamics_cw(config, *writer); break;
            case Scenario::entangle: report.results = run_entangle(config, *writer); break;
            case Scenario::manifold: report.results = run_manifold(config, *writer); break;
        }
    } catch (const ConfigError& e) {
        report.exit_code = exit_code::config;
        report.message = e.what();
    } catch (const IoError& e) {
        report.exit_code = exit_code::io;
        report.message = e.what();
    } catch (const fs::filesystem_error& e) {
        report.exit_code = exit_code::io;
        report.message = e.what();
    } catch (const std::exception& e) {
        report.exit_code = exit_code::numerical;
        report.message = e.what();
    }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (writer) report.files = writer->files();
    if (!writer) return report;

    json manifest;
    manifest["tool"] = "plexq";
    manifest["scenario"] = scenario_name(config.scenario);
    manifest["status"] = report.exit_code == exit_code::ok ? "ok" : "error";
    manifest["exit_code"] = report.exit_code;
    if (!report.message.empty()) manifest["error"] = report.message;
    manifest["config"] = to_json(config);
    manifest["constants"] = constants_json();
    manifest["versions"] = versions_json();
    manifest["started_utc"] = started;
    manifest["wall_time_s"] = report.wall_time;
    manifest["outputs"] = json::array();
    for (const auto& f : report.files) {
        manifest["outputs"].push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    manifest["results"] = report.results;
    try {
        write_json(config.output_dir / "manifest.json", manifest);
    } catch (const IoError& e) {
        if (report.exit_code == exit_code::ok) {
            report.exit_code = exit_code::io;
            report.message = e.what();
        }
    }
    return report;
}

SweepReport sweep(const json& doc, const std::string& axis, const std::vector<double>& values) {
    SweepReport sr;
    if (values.empty()) throw ConfigError("", "sweep needs at least one value");
    const ScenarioConfig base = parse_config(doc);
    std::string axis_tag = axis;
    std::replace(axis_tag.begin(), axis_tag.end(), '.', '_');

    json summary = {{"tool", "plexq"}, {"axis", axis}, {"runs", json::array()}};
    for (double v : values) {
        SweepEntry entry;
        entry.value = v;
        entry.output_dir = base.output_dir / (axis_tag + "_" + value_suffix(v));
        json leg = doc;
        try {
            set_numeric_field(leg, axis, v);
            leg["output_dir"] = entry.output_dir.string();
            entry.report = run(parse_config(leg));
        } catch (const ConfigError& e) {
            entry.report.exit_code = exit_code::config;
            entry.report.message = e.what();
        }
        summary["runs"].push_back({{"value", v},
                                   {"output_dir", entry.output_dir.string()},
                                   {"exit_code", entry.report.exit_code},
                                   {"status", entry.report.exit_code == exit_code::ok ? "ok" : "error"},
                                   {"error", entry.report.message}});
        sr.exit_code = std::max(sr.exit_code, entry.report.exit_code);
        sr.entries.push_back(std::move(entry));
    }
    try {
        fs::create_directories(base.output_dir);
        write_json(base.output_dir / "sweep_manifest.json", summary);
    } catch (const std::exception&) {
        sr.exit_code = std::max(sr.exit_code, exit_code::io);
    }
    return sr;
}

}  // namespace plexq
