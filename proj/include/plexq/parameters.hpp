// parameters.hpp: physical parameters of the dot/plasmon model

#pragma once

#include <cstddef>
#include <vector>

namespace plexq {

// All energies and rates are hbar*omega / hbar*gamma in eV.
struct ParameterSet {
    double omega0{2.042};          // dot transition energy
    double omega_pl{2.042};        // plasmon energy
    double omega_L{2.042};         // drive carrier energy
    std::vector<double> g{0.0108}; // per-dot coupling
    double gamma1{268e-9};         // spontaneous emission
    double gamma2_star{0.00127};   // pure dephasing
    double gamma_pl{0.150};        // plasmon damping
    double d0{13.9};               // dot dipole, Debye
    double d_pl{2990.0};           // plasmon dipole, Debye
    double E_L{1.38e-7};           // field amplitude, atomic units
    double t_c{50.0};              // pulse center, fs
    double tau_L{10.0};            // pulse width, fs
    double n_med{1.5};             // refractive index of the medium
    bool cw_mode{false};           // unit envelope instead of the Gaussian

    std::size_t n_dots() const { return g.size(); }

    // total dot amplitude loss rate, 2*gamma2* + gamma1
    double Gamma() const { return 2.0 * gamma2_star + gamma1; }

    // throws std::invalid_argument on negative rates, n_med < 1, empty g ...
    void validate() const;
};

// Optical-spectra set (one or more identical dots between two gold particles).
ParameterSet parameter_set_1(std::size_t n_dots = 1);

// Gap-plasmon set used for the coherence/entanglement runs. gamma_pl holds
// the gap-plasmon decay rate; the dipoles are carried over from set 1 and
// the drive is off.
ParameterSet parameter_set_2(std::size_t n_dots = 2);

ParameterSet parameter_set(int which, std::size_t n_dots);

}  // namespace plexq
