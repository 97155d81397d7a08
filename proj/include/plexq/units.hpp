// units.hpp: absorption cross section from a polarizability in model units

#pragma once

#include <complex>

namespace plexq {

// sigma = (n_med omega / (eps0 c)) Im[alpha], with alpha in Debye per atomic
// field unit and omega in eV. Returns cm^2.
double convert_cross_section(std::complex<double> alpha_raw, double omega_eV, double n_med);

// Debye/(a.u. field) -> C m^2 / V
double polarizability_to_SI(double alpha_raw);

}  // namespace plexq
