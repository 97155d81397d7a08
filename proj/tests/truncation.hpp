// truncation.hpp: Fock-truncation convergence check
//
// Runs the same scenario at N_pl and N_pl + extra plasmon states and reports
// the largest absolute change of any recorded observable.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "plexq/dynamics.hpp"

namespace plexq::testing {

// `start` builds the initial state for a given basis.
inline double truncation_change(const ParameterSet& params, std::size_t n_pl, Solver solver,
                                const std::function<QuantumState(const BasisDescriptor&)>& start,
                                const PropagationOptions& options, std::size_t extra = 2) {
    const auto drive = drive_from(params);
    const auto small = build_basis(static_cast<long>(params.n_dots()), static_cast<long>(n_pl));
    const auto large = build_basis(static_cast<long>(params.n_dots()), static_cast<long>(n_pl + extra));
    const Trajectory a = propagate(start(small), params, small, solver, drive, options);
    const Trajectory b = propagate(start(large), params, large, solver, drive, options);

    double worst = 0.0;
    auto compare = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
    };
    for (std::size_t j = 0; j < a.n_dots(); ++j) compare(a.dot_population[j], b.dot_population[j]);
    compare(a.plasmon_population, b.plasmon_population);
    compare(a.dipole, b.dipole);
    compare(a.norm_or_trace, b.norm_or_trace);
    return worst;
}

}  // namespace plexq::testing
