#include "plexq/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "plexq/constants.hpp"
#include "plexq/dynamics.hpp"
#include "plexq/errors.hpp"
#include "plexq/units.hpp"

namespace plexq {

std::vector<double> SpectrumWindow::grid() const {
    if (!(d_omega > 0.0) || !(omega_max >= omega_min) || !(omega_min > 0.0)) {
        throw std::invalid_argument("spectrum window: need 0 < omega_min <= omega_max and d_omega > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((omega_max - omega_min) / d_omega + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = omega_min + static_cast<double>(k) * d_omega;
    return out;
}

namespace {

double uniform_step(std::span<const double> t) {
    if (t.size() < 2) throw std::invalid_argument("spectrum: need at least two time samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) throw std::invalid_argument("spectrum: time grid must be increasing");
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (std::abs((t[k] - t[k - 1]) - dt) > 1e-6 * dt) throw std::invalid_argument("spectrum: time grid is not uniform");
    }
    return dt;
}

}  // namespace

std::vector<std::complex<double>> fourier_sum(std::span<const double> series, std::span<const double> t_grid,
                                              std::span<const double> omega_grid) {
    if (series.size() != t_grid.size()) throw std::invalid_argument("fourier_sum: size mismatch");
    const double dt = uniform_step(t_grid);
    const std::size_t n = series.size();
    std::vector<std::complex<double>> out(omega_grid.size());
    constexpr std::size_t reseed = 512;
    for (std::size_t w = 0; w < omega_grid.size(); ++w) {
        const double rate = omega_grid[w] / constants::hbar;
        const std::complex<double> step = std::polar(1.0, rate * dt);
        std::complex<double> sum = 0.0;
        std::complex<double> phase = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k % reseed == 0) phase = std::polar(1.0, rate * (t_grid[0] + static_cast<double>(k) * dt));
            sum += series[k] * phase;
            phase *= step;
        }
        out[w] = sum;
    }
    return out;
}

PolarizabilityResult polarizability(std::span<const double> mu, std::span<const double> field,
                                    std::span<const double> t_grid, std::span<const double> omega_grid,
                                    const PolarizabilityOptions& options) {
    if (mu.size() != t_grid.size() || field.size() != t_grid.size()) {
        throw std::invalid_argument("polarizability: series and grid sizes differ");
    }
    const double dt = uniform_step(t_grid);

    double peak = 0.0;
    for (double m : mu) peak = std::max(peak, std::abs(m));
    if (peak > 0.0) {
        const auto tail = std::min<std::size_t>(mu.size(), static_cast<std::size_t>(options.tail_window / dt) + 1);
        double tail_max = 0.0;
        for (std::size_t k = mu.size() - tail; k < mu.size(); ++k) tail_max = std::max(tail_max, std::abs(mu[k]));
        if (tail_max > options.decay_floor * peak) {
            throw InsufficientPropagation("dipole signal has not decayed by t_end (|mu|/peak = " +
                                          std::to_string(tail_max / peak) + ")");
        }
    }

    const auto num = fourier_sum(mu, t_grid, omega_grid);
    const auto den = fourier_sum(field, t_grid, omega_grid);
    double den_peak = 0.0;
    for (const auto& d : den) den_peak = std::max(den_peak, std::abs(d));

    PolarizabilityResult out;
    out.alpha.assign(omega_grid.size(), 0.0);
    out.masked.assign(omega_grid.size(), 0);
    const double root_n = std::sqrt(options.n_med);
    for (std::size_t w = 0; w < omega_grid.size(); ++w) {
        if (den_peak == 0.0 || std::abs(den[w]) < options.mask_threshold * den_peak) {
            out.masked[w] = 1;
            ++out.masked_count;
            continue;
        }
        out.alpha[w] = num[w] / (root_n * den[w]);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

void append(Trajectory& into, const Trajectory& more) {
    // `more` starts at the last record of `into`
    for (std::size_t k = 1; k < more.size(); ++k) {
        into.time.push_back(more.time[k]);
        for (std::size_t j = 0; j < into.dot_population.size(); ++j) {
            into.dot_population[j].push_back(more.dot_population[j][k]);
        }
        into.plasmon_population.push_back(more.plasmon_population[k]);
        into.dipole.push_back(more.dipole[k]);
        into.norm_or_trace.push_back(more.norm_or_trace[k]);
    }
    auto& d = into.diagnostics;
    d.max_trace_error = std::max(d.max_trace_error, more.diagnostics.max_trace_error);
    d.max_hermiticity_error = std::max(d.max_hermiticity_error, more.diagnostics.max_hermiticity_error);
    d.min_eigenvalue = std::min(d.min_eigenvalue, more.diagnostics.min_eigenvalue);
    into.final_state = more.final_state;
}

bool decayed(const Trajectory& traj, const PolarizabilityOptions& opt) {
    double peak = 0.0;
    for (double m : traj.dipole) peak = std::max(peak, std::abs(m));
    if (peak == 0.0) return true;
    const double dt = traj.time[1] - traj.time[0];
    const auto tail = std::min<std::size_t>(traj.size(), static_cast<std::size_t>(opt.tail_window / dt) + 1);
    double tail_max = 0.0;
    for (std::size_t k = traj.size() - tail; k < traj.size(); ++k) tail_max = std::max(tail_max, std::abs(traj.dipole[k]));
    return tail_max <= opt.decay_floor * peak;
}

}  // namespace

Trajectory spectrum_trajectory(const ParameterSet& params, const BasisDescriptor& basis, Solver solver,
                               const DriveSpec& drive, const SpectrumOptions& options) {
    if (drive.cw_mode) throw std::invalid_argument("spectrum: requires a pulsed drive (cw_mode is set)");
    drive.validate();
    PropagationOptions opt;
    opt.t_end = options.t_end;
    opt.dt = options.dt;
    opt.record.stride = options.record_stride;

    const QuantumState ground = solver == Solver::lindblad
                                    ? QuantumState{ground_density_matrix(basis)}
                                    : QuantumState{basis_wave_packet(basis, basis.ground_index())};
    Trajectory traj = propagate(ground, params, basis, solver, drive, opt);
    while (!decayed(traj, options.polarizability) && opt.t_end + 0.5 * opt.dt < options.max_t_end) {
        opt.t_start = opt.t_end;
        opt.t_end = std::min(opt.t_end + options.extension, options.max_t_end);
        append(traj, propagate(traj.final_state.state, params, basis, solver, drive, opt));
    }
    return traj;
}

Spectrum spectrum_from_trajectory(const Trajectory& traj, const DriveSpec& drive, const SpectrumOptions& options) {
    std::vector<double> field(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) field[k] = field_at(drive, traj.time[k]);

    Spectrum spec;
    spec.solver = traj.solver;
    spec.t_end = traj.time.back();
    spec.omega = options.window.grid();
    const auto pol = polarizability(traj.dipole, field, traj.time, spec.omega, options.polarizability);
    spec.alpha = pol.alpha;
    spec.masked = pol.masked;
    spec.sigma.resize(spec.omega.size());
    for (std::size_t w = 0; w < spec.omega.size(); ++w) {
        spec.sigma[w] = spec.masked[w] ? 0.0
                                       : convert_cross_section(spec.alpha[w], spec.omega[w], options.polarizability.n_med);
    }
    return spec;
}

Spectrum run_spectrum_scenario(const ParameterSet& params, const BasisDescriptor& basis, Solver solver,
                               const DriveSpec& drive, const SpectrumOptions& options) {
    const Trajectory traj = spectrum_trajectory(params, basis, solver, drive, options);
    return spectrum_from_trajectory(traj, drive, options);
}

DipFeatures analyze_dip(const Spectrum& spectrum, double center, double halfwidth) {
    DipFeatures f;
    const auto& s = spectrum.sigma;
    const auto& w = spectrum.omega;
    if (s.size() < 3) return f;
    f.peak_sigma = *std::max_element(s.begin(), s.end());
    std::size_t best = 0;
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        if (std::abs(w[k] - center) > halfwidth) continue;
        if (s[k] <= s[k - 1] && s[k] <= s[k + 1] && (!f.found || s[k] < s[best])) {
            best = k;
            f.found = true;
        }
    }
    if (!f.found) return f;
    f.dip_omega = w[best];
    f.dip_sigma = s[best];
    f.left_shoulder = *std::max_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    f.right_shoulder = *std::max_element(s.begin() + static_cast<std::ptrdiff_t>(best), s.end());
    return f;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum) {
    os << "omega_eV,sigma_cm2,re_alpha,im_alpha,masked_flag\n";
    for (std::size_t k = 0; k < spectrum.omega.size(); ++k) {
        os << format_number(spectrum.omega[k]) << ',' << format_number(spectrum.sigma[k]) << ','
           << format_number(spectrum.alpha[k].real()) << ',' << format_number(spectrum.alpha[k].imag()) << ','
           << (spectrum.masked[k] ? 1 : 0) << '\n';
    }
}

}  // namespace plexq
