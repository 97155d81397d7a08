// trajectory.hpp: recorded observables of a propagation

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "plexq/states.hpp"

namespace plexq {

enum class Solver { lindblad, nonhermitian };

const char* solver_name(Solver s);

struct RecordSpec {
    std::size_t stride{10};       // integrator steps between records
    bool keep_states{false};      // store a state snapshot at every record
    std::size_t state_stride{1};  // records between snapshots when keep_states
};

// Worst-case density-matrix diagnostics over all recorded times.
struct LindbladDiagnostics {
    double max_trace_error{0.0};
    double max_hermiticity_error{0.0};
    double min_eigenvalue{1.0};
};

struct Snapshot {
    double t{0.0};
    QuantumState state;
};

// Columns t_fs, pop_dot_1..n, pop_plasmon, mu_expect, norm_or_trace.
// For the non-Hermitian backend the expectation values are <psi|O|psi> on
// the unnormalized wave packet and the last column is <psi|psi>.
struct Trajectory {
    Solver solver{Solver::lindblad};
    std::vector<double> time;
    std::vector<std::vector<double>> dot_population;  // [dot][record]
    std::vector<double> plasmon_population;
    std::vector<double> dipole;                       // Debye
    std::vector<double> norm_or_trace;
    std::vector<Snapshot> snapshots;
    Snapshot final_state;  // lab-frame state at the last grid time
    LindbladDiagnostics diagnostics;

    std::size_t size() const { return time.size(); }
    std::size_t n_dots() const { return dot_population.size(); }
    void reserve(std::size_t n_dots, std::size_t records);
};

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
std::string format_number(double value);

}  // namespace plexq
