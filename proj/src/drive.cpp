#include "plexq/drive.hpp"

#include <cmath>
#include <stdexcept>

#include "plexq/constants.hpp"

namespace plexq {

void DriveSpec::validate() const {
    if (!(E_L >= 0.0)) throw std::invalid_argument("drive: E_L must be >= 0");
    if (!cw_mode && !(tau_L > 0.0)) throw std::invalid_argument("drive: tau_L must be > 0");
}

DriveSpec drive_from(const ParameterSet& params) {
    return DriveSpec{params.E_L, params.omega_L, params.t_c, params.tau_L, params.cw_mode};
}

double field_at(const DriveSpec& drive, double t) {
    const double carrier = std::cos(drive.omega_L * t / constants::hbar);
    if (drive.cw_mode) return drive.E_L * carrier;
    const double x = (t - drive.t_c) / drive.tau_L;
    return drive.E_L * std::exp(-x * x) * carrier;
}

}  // namespace plexq
