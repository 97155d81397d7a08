#include "plexq/trajectory.hpp"

#include <cstdio>
#include <ostream>

namespace plexq {

const char* solver_name(Solver s) {
    return s == Solver::lindblad ? "lindblad" : "nonhermitian";
}

void Trajectory::reserve(std::size_t n_dots, std::size_t records) {
    time.reserve(records);
    dot_population.assign(n_dots, {});
    for (auto& col : dot_population) col.reserve(records);
    plasmon_population.reserve(records);
    dipole.reserve(records);
    norm_or_trace.reserve(records);
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t_fs";
    for (std::size_t j = 1; j <= traj.n_dots(); ++j) os << ",pop_dot_" << j;
    os << ",pop_plasmon,mu_expect,norm_or_trace\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << format_number(traj.time[k]);
        for (const auto& col : traj.dot_population) os << ',' << format_number(col[k]);
        os << ',' << format_number(traj.plasmon_population[k]) << ',' << format_number(traj.dipole[k]) << ','
           << format_number(traj.norm_or_trace[k]) << '\n';
    }
}

}  // namespace plexq
