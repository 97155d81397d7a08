// errors.hpp: exception types shared across modules

#pragma once

#include <stdexcept>
#include <string>

namespace plexq {

// Numerical diagnostic raised during time propagation (trace drift, loss of
// positivity, norm growth). Carries the time at which it was detected.
class PropagationError : public std::runtime_error {
public:
    PropagationError(const std::string& what, double time_fs)
        : std::runtime_error(what + " at t = " + std::to_string(time_fs) + " fs"), time_(time_fs) {}

    double time() const { return time_; }

private:
    double time_;
};

// The dipole signal has not decayed by the end of the time grid.
class InsufficientPropagation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace plexq
