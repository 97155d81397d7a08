// drive.hpp: external optical field

#pragma once

#include "plexq/parameters.hpp"

namespace plexq {

struct DriveSpec {
    double E_L{0.0};      // amplitude, atomic units
    double omega_L{0.0};  // carrier energy, eV
    double t_c{0.0};      // envelope center, fs
    double tau_L{1.0};    // envelope width, fs
    bool cw_mode{false};

    bool active() const { return E_L != 0.0; }
    void validate() const;
};

DriveSpec drive_from(const ParameterSet& params);

// E(t) = E_L exp(-((t - t_c)/tau_L)^2) cos(omega_L t / hbar), in atomic units.
// In cw_mode the envelope is 1.
double field_at(const DriveSpec& drive, double t);

}  // namespace plexq
