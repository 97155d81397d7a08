// constants.hpp: physical constants and unit conversions (CODATA 2018)
//
// Internal units: energies and rates in eV, time in fs, dipoles in Debye,
// field amplitudes in atomic units. SI only appears at the dipole coupling
// and when cross sections are reported.

#pragma once

namespace plexq::constants {

// reduced Planck constant, eV*fs (CODATA 2018: 6.582119569e-16 eV s)
inline constexpr double hbar = 0.6582119569;

// elementary charge, J per eV (exact since 2019 SI)
inline constexpr double joule_per_eV = 1.602176634e-19;

// 1 D = 1e-21 / c  C*m
inline constexpr double speed_of_light = 299792458.0;                 // m/s
inline constexpr double debye_to_Cm = 1.0e-21 / speed_of_light;       // C*m

// atomic unit of electric field, V/m (CODATA 2018: 5.14220674763e11)
inline constexpr double au_field_to_Vpm = 5.14220674763e11;

// vacuum permittivity, F/m (CODATA 2018)
inline constexpr double eps0 = 8.8541878128e-12;

// energy of a 1 Debye dipole in a 1 a.u. field, in eV (~10.7058)
inline constexpr double debye_au_to_eV = debye_to_Cm * au_field_to_Vpm / joule_per_eV;

inline constexpr double pi = 3.14159265358979323846;

}  // namespace plexq::constants
