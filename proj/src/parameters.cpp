#include "plexq/parameters.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace plexq {

namespace {

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0)) {
        throw std::invalid_argument(std::string("parameter ") + name + " must be >= 0");
    }
}

}  // namespace

void ParameterSet::validate() const {
    if (g.empty()) throw std::invalid_argument("parameter g: at least one dot required");
    for (double gj : g) {
        if (!std::isfinite(gj)) throw std::invalid_argument("parameter g: non-finite coupling");
    }
    require_nonnegative(gamma1, "gamma1");
    require_nonnegative(gamma2_star, "gamma2_star");
    require_nonnegative(gamma_pl, "gamma_pl");
    require_nonnegative(d0, "d0");
    require_nonnegative(d_pl, "d_pl");
    require_nonnegative(E_L, "E_L");
    require_nonnegative(tau_L, "tau_L");
    if (!(n_med >= 1.0)) throw std::invalid_argument("parameter n_med must be >= 1");
    if (!cw_mode && E_L > 0.0 && !(tau_L > 0.0)) {
        throw std::invalid_argument("parameter tau_L must be > 0 for a pulsed drive");
    }
}

ParameterSet parameter_set_1(std::size_t n_dots) {
    ParameterSet p;
    p.g.assign(n_dots, 0.0108);
    return p;
}

ParameterSet parameter_set_2(std::size_t n_dots) {
    ParameterSet p;
    p.omega0 = 1.44;
    p.omega_pl = 1.44;
    p.omega_L = 1.44;
    p.g.assign(n_dots, 0.0167);
    p.gamma1 = 666e-9;
    p.gamma2_star = 0.0017;
    p.gamma_pl = 0.033;
    p.E_L = 0.0;
    return p;
}

ParameterSet parameter_set(int which, std::size_t n_dots) {
    switch (which) {
        case 1: return parameter_set_1(n_dots);
        case 2: return parameter_set_2(n_dots);
        default: throw std::invalid_argument("parameter_set must be 1 or 2");
    }
}

}  // namespace plexq
