// spectrum.hpp: linear absorption spectra from pulsed-drive propagations
//
// alpha(omega) = FT[<mu>](omega) / (sqrt(n_med) FT[E](omega)), both transforms
// taken as plain discrete sums over the shared uniform time grid and
// evaluated directly on the requested omega grid (equivalent to an
// arbitrarily zero-padded DFT). No window function is applied.

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "plexq/basis.hpp"
#include "plexq/drive.hpp"
#include "plexq/parameters.hpp"
#include "plexq/trajectory.hpp"

namespace plexq {

struct SpectrumWindow {
    double omega_min{1.85};  // eV
    double omega_max{2.25};  // eV
    double d_omega{0.0002};  // eV

    std::vector<double> grid() const;
};

struct PolarizabilityOptions {
    double n_med{1.5};
    double decay_floor{1e-6};     // |<mu>| at t_end relative to its peak
    double tail_window{10.0};     // fs at the end of the grid used for the decay test
    double mask_threshold{1e-12}; // |FT[E]| relative to its peak on the grid
};

struct PolarizabilityResult {
    std::vector<std::complex<double>> alpha;  // Debye per a.u. field
    std::vector<char> masked;
    std::size_t masked_count{0};
};

// sum_k x_k exp(i omega t_k / hbar) for every omega (eV)
std::vector<std::complex<double>> fourier_sum(std::span<const double> series, std::span<const double> t_grid,
                                              std::span<const double> omega_grid);

// Throws InsufficientPropagation when the dipole has not decayed to the floor,
// std::invalid_argument on size mismatch or a non-uniform grid.
PolarizabilityResult polarizability(std::span<const double> mu, std::span<const double> field,
                                    std::span<const double> t_grid, std::span<const double> omega_grid,
                                    const PolarizabilityOptions& options);

struct Spectrum {
    Solver solver{Solver::lindblad};
    std::vector<double> omega;                // eV
    std::vector<std::complex<double>> alpha;  // Debye per a.u. field
    std::vector<double> sigma;                // cm^2
    std::vector<char> masked;
    double t_end{0.0};                        // horizon actually propagated, fs
};

struct SpectrumOptions {
    SpectrumWindow window{};
    double t_end{2500.0};
    double dt{0.005};
    std::size_t record_stride{10};
    // The run is extended in `extension` fs chunks until the dipole decays
    // below the floor, up to `max_t_end`.
    double extension{500.0};
    double max_t_end{10000.0};
    PolarizabilityOptions polarizability{};
};

// Ground-state start, pulsed drive, <mu(t)> recorded and transformed.
Spectrum run_spectrum_scenario(const ParameterSet& params, const BasisDescriptor& basis, Solver solver,
                               const DriveSpec& drive, const SpectrumOptions& options);

// Runs the propagation only (with the same decay-driven extension).
Trajectory spectrum_trajectory(const ParameterSet& params, const BasisDescriptor& basis, Solver solver,
                               const DriveSpec& drive, const SpectrumOptions& options);

Spectrum spectrum_from_trajectory(const Trajectory& traj, const DriveSpec& drive, const SpectrumOptions& options);

// Transparency-dip features of a spectrum.
struct DipFeatures {
    bool found{false};
    double dip_omega{0.0};
    double dip_sigma{0.0};
    double left_shoulder{0.0};   // largest sigma between the window start and the dip
    double right_shoulder{0.0};  // largest sigma between the dip and the window end
    double peak_sigma{0.0};      // global maximum
    double depth() const { return found ? std::max(left_shoulder, right_shoulder) - dip_sigma : 0.0; }
};

// Looks for the lowest local minimum of sigma within +-halfwidth of center.
DipFeatures analyze_dip(const Spectrum& spectrum, double center, double halfwidth);

void write_spectrum_csv(std::ostream& os, const Spectrum& spectrum);

}  // namespace plexq
