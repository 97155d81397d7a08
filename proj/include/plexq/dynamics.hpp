// dynamics.hpp: time propagation of the density matrix (Lindblad) and of
// the wave packet under the effective non-Hermitian Hamiltonian
//
// Both backends use fixed-step classical RK4 with the full lab-frame drive
// -mu E(t). The integration variable is taken in the interaction picture of
// the diagonal bare energies D = omega0 sum sigma^+ sigma + omega_pl b^+ b,
//   psi = exp(-i D t/hbar) phi,  rho = exp(-i D t/hbar) rho_I exp(i D t/hbar),
// which is an exact change of variables (no rotating-wave approximation):
// RK4 then only resolves the couplings, losses and drive, not the optical
// carrier phase. Recorded observables and snapshots are in the lab frame.
// Records are taken every RecordSpec::stride steps on t_k = t_start + k dt.

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "plexq/drive.hpp"
#include "plexq/operators.hpp"
#include "plexq/parameters.hpp"
#include "plexq/states.hpp"
#include "plexq/trajectory.hpp"

namespace plexq {

struct PropagationOptions {
    double t_start{0.0};
    double t_end{2500.0};
    double dt{0.005};
    RecordSpec record{};
};

// Thresholds that abort a propagation.
inline constexpr double kTraceDriftLimit = 1e-6;
inline constexpr double kNegativityLimit = -1e-6;
inline constexpr double kNormGrowthLimit = 1e-6;

// (1/i hbar)[H, rho] + sum_k C_k rho C_k^+ - 1/2 {C_k^+ C_k, rho}
// H in eV, collapse operators in fs^-1/2; result in fs^-1.
Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, const OperatorMatrix& H,
                              const std::vector<OperatorMatrix>& collapse);

// Sparse operator in the interaction picture of a diagonal energy list d:
//   M(e, t)_kl = (fixed_kl + e per_field_kl) exp(i (d_k - d_l) t / hbar).
// Entries are grouped by their Bohr frequency so each evaluation needs only a
// handful of complex exponentials.
class PictureOperator {
public:
    PictureOperator() = default;
    PictureOperator(const Eigen::MatrixXcd& fixed, const Eigen::MatrixXcd& per_field,
                    const Eigen::VectorXd& energies);
    PictureOperator(const Eigen::MatrixXcd& fixed, const Eigen::VectorXd& energies);

    std::size_t nonzeros() const { return rows_.size(); }
    std::size_t frequency_count() const { return frequencies_.size(); }

    // Entry values at (e, t), written to `values` (size nonzeros()).
    void evaluate(double e, double t, std::vector<cd>& values) const;

    // out = M x, with M given by values from evaluate()
    void multiply(const std::vector<cd>& values, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) const;
    void multiply(const std::vector<cd>& values, const Eigen::VectorXcd& x, Eigen::VectorXcd& out) const;
    // out += x M^+
    void add_times_adjoint(const std::vector<cd>& values, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& out) const;

    // sum_kl M_kl rho_lk (= Tr(M rho))
    cd trace_product(const std::vector<cd>& values, const Eigen::MatrixXcd& rho) const;
    // <x| M |x>
    cd expectation(const std::vector<cd>& values, const Eigen::VectorXcd& x) const;

private:
    std::vector<Eigen::Index> rows_, cols_;
    std::vector<cd> fixed_, per_field_;
    std::vector<std::size_t> freq_;
    std::vector<double> frequencies_;  // rad/fs
    mutable std::vector<cd> phasors_;
};

// Diagonal of the bare Hamiltonian, eV.
Eigen::VectorXd bare_energies(const ParameterSet& params, const BasisDescriptor& basis);

// Interaction-picture Lindblad generator:
//   d rho_I/dt = A + A^+ + sum_k C_k rho_I C_k^+,  A = K_I(t) rho_I,
//   K = -(i/hbar)(H_0 - D - mu E(t)) - 1/2 sum_k C_k^+ C_k.
// Each collapse operator shifts the bare energy by a fixed amount, so its
// phases cancel in C rho C^+. Holds scratch buffers: one instance per run.
class LindbladGenerator {
public:
    LindbladGenerator(const ParameterSet& params, const BasisDescriptor& basis, const DriveSpec& drive);

    void apply(double t, const Eigen::MatrixXcd& rho_I, Eigen::MatrixXcd& out) const;
    double field(double t) const;
    const Eigen::VectorXd& energies() const { return energies_; }

private:
    DriveSpec drive_;
    Eigen::VectorXd energies_;
    PictureOperator generator_;
    std::vector<PictureOperator> jumps_;
    std::vector<std::vector<cd>> jump_values_;
    mutable std::vector<cd> values_;
    mutable Eigen::MatrixXcd scratch_;
};

// d phi/dt = -(i/hbar) (H_c(t) - D)_I phi
class EffectiveSchrodinger {
public:
    EffectiveSchrodinger(const ParameterSet& params, const BasisDescriptor& basis, const DriveSpec& drive);

    void apply(double t, const Eigen::VectorXcd& phi, Eigen::VectorXcd& out) const;
    double field(double t) const;
    const Eigen::VectorXd& energies() const { return energies_; }

private:
    DriveSpec drive_;
    Eigen::VectorXd energies_;
    PictureOperator generator_;
    mutable std::vector<cd> values_;
};

// Conversions between lab frame and interaction picture at time t.
Eigen::MatrixXcd to_lab_frame(const Eigen::MatrixXcd& rho_I, const Eigen::VectorXd& energies, double t);
Eigen::MatrixXcd to_interaction_picture(const Eigen::MatrixXcd& rho, const Eigen::VectorXd& energies, double t);
Eigen::VectorXcd to_lab_frame(const Eigen::VectorXcd& phi, const Eigen::VectorXd& energies, double t);
Eigen::VectorXcd to_interaction_picture(const Eigen::VectorXcd& psi, const Eigen::VectorXd& energies, double t);

// Observable evaluation shared by both backends.
// States passed to record() are interaction-picture states at time t.
class ObservableSet {
public:
    ObservableSet(const ParameterSet& params, const BasisDescriptor& basis);

    void record(Trajectory& traj, double t, const Eigen::MatrixXcd& rho_I) const;
    void record(Trajectory& traj, double t, const Eigen::VectorXcd& phi) const;

private:
    BasisDescriptor basis_;
    PictureOperator dipole_;
    mutable std::vector<cd> values_;
};

Trajectory propagate_lindblad(const DensityMatrix& rho0, const ParameterSet& params,
                              const BasisDescriptor& basis, const DriveSpec& drive,
                              const PropagationOptions& options);

Trajectory propagate_nonhermitian(const WavePacket& psi0, const ParameterSet& params,
                                  const BasisDescriptor& basis, const DriveSpec& drive,
                                  const PropagationOptions& options);

// Dispatches on the backend. A wave packet given to the Lindblad backend is
// converted to |psi><psi|.
Trajectory propagate(const QuantumState& start, const ParameterSet& params, const BasisDescriptor& basis,
                     Solver solver, const DriveSpec& drive, const PropagationOptions& options);

// Which trajectory columns participate in steady-state detection.
struct SteadyStateOptions {
    bool populations{true};
    bool dipole{true};
    bool norm{true};
    // Trailing moving average (fs) applied to each column first, e.g. one
    // carrier period to remove the ripple of a CW drive. 0 = raw records.
    double smoothing{0.0};
};

// Earliest record time t_s such that for every record time t >= t_s each
// selected observable varies by less than tol * |mean| over the trailing
// window [max(t_0, t - window), t]. Identically zero columns are steady.
// Returns nullopt if the last record fails.
std::optional<double> detect_steady_state(const Trajectory& traj, double window, double tol,
                                          const SteadyStateOptions& options = {});

}  // namespace plexq
