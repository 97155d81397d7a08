// states.hpp: density matrices and wave packets on the product basis

#pragma once

#include <variant>

#include <Eigen/Dense>

#include "plexq/basis.hpp"
#include "plexq/operators.hpp"

namespace plexq {

struct DensityMatrix {
    Eigen::MatrixXcd rho;
    BasisDescriptor basis;

    double trace() const { return rho.trace().real(); }
    double hermiticity_error() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;
    cd expect(const Eigen::MatrixXcd& op) const;
};

struct WavePacket {
    Eigen::VectorXcd psi;
    BasisDescriptor basis;

    double norm_squared() const { return psi.squaredNorm(); }
    // <psi|O|psi>, not divided by the norm
    cd expect(const Eigen::MatrixXcd& op) const;
    DensityMatrix projector() const;
};

using QuantumState = std::variant<DensityMatrix, WavePacket>;

WavePacket basis_wave_packet(const BasisDescriptor& basis, std::size_t flat);
DensityMatrix pure_density_matrix(const WavePacket& psi);
DensityMatrix ground_density_matrix(const BasisDescriptor& basis);

// |s=0, q_j = 1, other dots 0>
WavePacket dot_excited_wave_packet(const BasisDescriptor& basis, std::size_t j);

}  // namespace plexq
