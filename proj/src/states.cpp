#include "plexq/states.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace plexq {

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

cd DensityMatrix::expect(const Eigen::MatrixXcd& op) const {
    return (op * rho).trace();
}

cd WavePacket::expect(const Eigen::MatrixXcd& op) const {
    return psi.dot(op * psi);
}

DensityMatrix WavePacket::projector() const {
    return DensityMatrix{psi * psi.adjoint(), basis};
}

WavePacket basis_wave_packet(const BasisDescriptor& basis, std::size_t flat) {
    if (flat >= basis.dim()) throw std::out_of_range("basis_wave_packet: index out of range");
    WavePacket out{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dim())), basis};
    out.psi(static_cast<Eigen::Index>(flat)) = 1.0;
    return out;
}

DensityMatrix pure_density_matrix(const WavePacket& psi) { return psi.projector(); }

DensityMatrix ground_density_matrix(const BasisDescriptor& basis) {
    return pure_density_matrix(basis_wave_packet(basis, basis.ground_index()));
}

WavePacket dot_excited_wave_packet(const BasisDescriptor& basis, std::size_t j) {
    if (j < 1 || j > basis.n_dots()) throw std::invalid_argument("dot_excited_wave_packet: dot index out of range");
    std::vector<int> q(basis.n_dots(), 0);
    q[j - 1] = 1;
    return basis_wave_packet(basis, basis.index(0, q));
}

}  // namespace plexq
