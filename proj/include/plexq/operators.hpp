// operators.hpp: dense operators on the plasmon x dots basis

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "plexq/basis.hpp"
#include "plexq/drive.hpp"
#include "plexq/parameters.hpp"

namespace plexq {

using cd = std::complex<double>;

struct OperatorMatrix {
    Eigen::MatrixXcd m;
    BasisDescriptor basis;
    bool hermitian{false};

    OperatorMatrix() = default;
    OperatorMatrix(Eigen::MatrixXcd matrix, BasisDescriptor b, bool is_hermitian = false);

    std::size_t dim() const { return basis.dim(); }
    OperatorMatrix adjoint() const;

    // max |M - M^dagger|
    double hermiticity_error() const;
};

OperatorMatrix identity(const BasisDescriptor& basis);

// b, truncated at s = n_pl - 1
OperatorMatrix plasmon_annihilation(const BasisDescriptor& basis);

// sigma_j for dot j (1-based)
OperatorMatrix dot_lowering(const BasisDescriptor& basis, std::size_t j);

OperatorMatrix plasmon_number(const BasisDescriptor& basis);
OperatorMatrix dot_number(const BasisDescriptor& basis, std::size_t j);

// mu = d0 sum_j (sigma_j^+ + sigma_j) + d_pl (b^+ + b), in Debye
OperatorMatrix dipole_operator(const ParameterSet& params, const BasisDescriptor& basis);

// Field-free part of H in eV:
//   omega0 sum sigma^+ sigma + omega_pl b^+ b + sum g_j (sigma_j b^+ + sigma_j^+ b)
OperatorMatrix bare_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis);

// H(t) = bare - mu E(t), the dipole term converted to eV with debye_au_to_eV.
OperatorMatrix build_system_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                        const DriveSpec& drive, double t, bool include_drive);
OperatorMatrix build_system_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                        double t, bool include_drive);

// sqrt(gamma1) sigma_j, sqrt(2 gamma2*) sigma_j^+ sigma_j for each dot, then
// sqrt(gamma_pl) b. Entries in fs^-1/2 (rates divided by hbar).
std::vector<OperatorMatrix> build_collapse_operators(const ParameterSet& params,
                                                     const BasisDescriptor& basis);

// H_c(t) = H(t) - (i hbar / 2) sum_k C_k^+ C_k, in eV
OperatorMatrix build_effective_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                           const DriveSpec& drive, double t, bool include_drive);
OperatorMatrix build_effective_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                           double t, bool include_drive);

// -(i hbar / 2) sum_k C_k^+ C_k alone, in eV
Eigen::MatrixXcd loss_operator(const std::vector<OperatorMatrix>& collapse);

void check_consistent(const ParameterSet& params, const BasisDescriptor& basis);

}  // namespace plexq
