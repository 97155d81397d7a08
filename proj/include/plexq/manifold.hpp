// manifold.hpp: undriven single-excitation dynamics of N dots + one plasmon
//
// Basis: row/column 0 is |s=1, all q=0>, row j is dot j excited with the
// plasmon empty. The (N+1)x(N+1) effective Hamiltonian is
//   diag(omega_pl - i gamma_pl/2, omega0 - i Gamma/2, ...), couplings g_j
// in row and column 0. Without drive this subspace is closed; amplitude that
// leaves it has decayed to the global ground state.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "plexq/parameters.hpp"
#include "plexq/trajectory.hpp"

namespace plexq {

struct ManifoldHamiltonian {
    Eigen::MatrixXcd m;  // eV
    std::vector<double> couplings;

    std::size_t n_dots() const { return couplings.size(); }
    std::size_t dim() const { return couplings.size() + 1; }
};

// The parameter set supplies energies and rates; `couplings` replaces g.
ManifoldHamiltonian build_manifold_hamiltonian(const ParameterSet& params, const std::vector<double>& couplings);
ManifoldHamiltonian build_manifold_hamiltonian(const ParameterSet& params);

// psi(t) = V exp(-i Lambda t / hbar) V^-1 psi(0). If the eigenvector matrix
// has condition number above kMaxEigenCondition (e.g. the degenerate dark
// subspace of identical dots), the propagator falls back to RK4 stepping.
class ManifoldPropagator {
public:
    static constexpr double kMaxEigenCondition = 1e8;

    explicit ManifoldPropagator(const ManifoldHamiltonian& h, double fallback_dt = 0.005);

    Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const;
    // Amplitudes at each time of an increasing grid.
    std::vector<Eigen::VectorXcd> evolve(const Eigen::VectorXcd& psi0, const std::vector<double>& times) const;

    bool uses_fallback() const { return fallback_; }
    double eigenvector_condition() const { return condition_; }
    const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }

private:
    Eigen::MatrixXcd h_;
    Eigen::VectorXcd eigenvalues_;
    Eigen::MatrixXcd vectors_;
    Eigen::MatrixXcd inverse_;
    double condition_{0.0};
    bool fallback_{false};
    double fallback_dt_;
};

Eigen::VectorXcd eigen_propagate(const ManifoldHamiltonian& h, const Eigen::VectorXcd& psi0, double t);

// N draws from Normal(mean, std): mt19937_64 seeded with `seed`, uniforms
// from the top 53 bits of each output, Box-Muller pairs (cos branch first).
std::vector<double> sample_couplings(double mean, double std_dev, std::size_t n, std::uint64_t seed);

enum class CouplingMode { homogeneous, inhomogeneous };

struct ManifoldRun {
    CouplingMode mode{CouplingMode::homogeneous};
    std::uint64_t seed{0};
    std::vector<double> couplings;
    bool has_negative_couplings{false};
    bool used_fallback{false};
    Trajectory trajectory;               // norm column = sum |a|^2, mu_expect = 0
    std::vector<double> avg_concurrence; // per recorded time
};

struct ManifoldScenarioOptions {
    std::size_t n_dots{50};
    double coupling_mean{0.0167};
    double coupling_std{0.0167};
    double t_end{2500.0};
    double sample_dt{1.0};
    std::size_t initial_dot{1};
};

// Dot `initial_dot` excited at t = 0; drive must be off (E_L == 0).
ManifoldRun run_manifold_scenario(const ParameterSet& params, CouplingMode mode, std::uint64_t seed,
                                  const ManifoldScenarioOptions& options);

const char* coupling_mode_name(CouplingMode mode);

}  // namespace plexq
