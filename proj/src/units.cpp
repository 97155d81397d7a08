#include "plexq/units.hpp"

#include <stdexcept>

#include "plexq/constants.hpp"

namespace plexq {

double polarizability_to_SI(double alpha_raw) {
    return alpha_raw * constants::debye_to_Cm / constants::au_field_to_Vpm;
}

double convert_cross_section(std::complex<double> alpha_raw, double omega_eV, double n_med) {
    if (!(omega_eV > 0.0)) throw std::invalid_argument("convert_cross_section: omega must be > 0");
    const double omega_rad_s = omega_eV / constants::hbar * 1e15;
    const double sigma_m2 = n_med * omega_rad_s / (constants::eps0 * constants::speed_of_light)
                            * polarizability_to_SI(alpha_raw.imag());
    return sigma_m2 * 1e4;
}

}  // namespace plexq
