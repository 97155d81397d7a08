// entanglement.hpp: reduced two-dot density matrices and concurrence

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "plexq/states.hpp"

namespace plexq {

// Ordering |q1 q2> in {00, 01, 10, 11}.
struct TwoQubitDensityMatrix {
    Eigen::Matrix4cd rho;

    double trace() const { return rho.trace().real(); }
};

// How a non-Hermitian wave packet is turned into a density matrix.
enum class LostNormHandling {
    ground_padding,  // |psi><psi| + (1 - <psi|psi>) |0><0|
    renormalized,    // |psi><psi| / <psi|psi>
};

// Partial trace over the plasmon. The basis must hold exactly two dots.
TwoQubitDensityMatrix reduce_to_dots(const DensityMatrix& state);
TwoQubitDensityMatrix reduce_to_dots(const WavePacket& state,
                                     LostNormHandling handling = LostNormHandling::ground_padding);
TwoQubitDensityMatrix reduce_to_dots(const QuantumState& state,
                                     LostNormHandling handling = LostNormHandling::ground_padding);

// Wootters concurrence, clamped to [0, 1]. Throws std::invalid_argument if
// rho is not Hermitian (1e-10), not unit trace (1e-8) or has an eigenvalue
// below -1e-8.
double wootters_concurrence(const TwoQubitDensityMatrix& rho);

// Concurrence of dots i and j (1-based) for a single-excitation amplitude
// vector [plasmon, dot 1, ..., dot N] with missing norm in the ground state:
// C_ij = 2 |a_i| |a_j|.
double manifold_pair_concurrence(std::span<const std::complex<double>> amplitudes, std::size_t i, std::size_t j);

// Mean of C_ij over all N(N-1)/2 unordered dot pairs.
double average_bipartite_concurrence(std::span<const std::complex<double>> amplitudes, std::size_t n_dots);

}  // namespace plexq
