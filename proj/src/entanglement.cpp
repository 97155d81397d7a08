#include "plexq/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace plexq {

namespace {

void require_two_dots(const BasisDescriptor& basis) {
    if (basis.n_dots() != 2) throw std::invalid_argument("reduce_to_dots: basis must contain exactly two dots");
}

// Eigenvalues of rho below this fraction of the largest are treated as zero
// when factoring rho = A A^+.
constexpr double kRankCutoff = 1e-12;

}  // namespace

TwoQubitDensityMatrix reduce_to_dots(const DensityMatrix& state) {
    require_two_dots(state.basis);
    TwoQubitDensityMatrix out{Eigen::Matrix4cd::Zero()};
    const std::size_t n_pl = state.basis.n_pl();
    for (std::size_t s = 0; s < n_pl; ++s) {
        const auto off = static_cast<Eigen::Index>(4 * s);
        out.rho += state.rho.block<4, 4>(off, off);
    }
    return out;
}

TwoQubitDensityMatrix reduce_to_dots(const WavePacket& state, LostNormHandling handling) {
    require_two_dots(state.basis);
    const double norm = state.norm_squared();
    TwoQubitDensityMatrix out{Eigen::Matrix4cd::Zero()};
    const std::size_t n_pl = state.basis.n_pl();
    for (std::size_t s = 0; s < n_pl; ++s) {
        const Eigen::Vector4cd block = state.psi.segment<4>(static_cast<Eigen::Index>(4 * s));
        out.rho += block * block.adjoint();
    }
    if (handling == LostNormHandling::ground_padding) {
        out.rho(0, 0) += 1.0 - norm;
    } else {
        if (!(norm > 0.0)) throw std::invalid_argument("reduce_to_dots: zero wave packet cannot be renormalized");
        out.rho /= norm;
    }
    return out;
}

TwoQubitDensityMatrix reduce_to_dots(const QuantumState& state, LostNormHandling handling) {
    if (const auto* rho = std::get_if<DensityMatrix>(&state)) return reduce_to_dots(*rho);
    return reduce_to_dots(std::get<WavePacket>(state), handling);
}

// lambda_i are the singular values of A^T (sy x sy) A for any A with
// rho = A A^+; they equal the square roots of the eigenvalues of
// rho (sy x sy) rho^* (sy x sy) without squaring the round-off.
double wootters_concurrence(const TwoQubitDensityMatrix& state) {
    const Eigen::Matrix4cd& rho = state.rho;
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("wootters_concurrence: density matrix is not Hermitian");
    }
    if (std::abs(state.trace() - 1.0) > 1e-8) {
        throw std::invalid_argument("wootters_concurrence: density matrix must have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> eig(0.5 * (rho + rho.adjoint()));
    const Eigen::Vector4d w = eig.eigenvalues();
    if (w.minCoeff() < -1e-8) throw std::invalid_argument("wootters_concurrence: density matrix is not positive");

    const double cutoff = kRankCutoff * std::max(w.maxCoeff(), 0.0);
    Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
        if (w(k) > cutoff) a.col(k) = std::sqrt(w(k)) * eig.eigenvectors().col(k);
    }
    // sigma_y x sigma_y in the |00>,|01>,|10>,|11> ordering
    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Eigen::Matrix4cd tau = a.transpose() * yy * a;
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(tau);
    const Eigen::Vector4d lam = svd.singularValues();  // decreasing
    const double c = lam(0) - lam(1) - lam(2) - lam(3);
    return std::clamp(c, 0.0, 1.0);
}

double manifold_pair_concurrence(std::span<const std::complex<double>> amplitudes, std::size_t i, std::size_t j) {
    if (i < 1 || j < 1 || i >= amplitudes.size() || j >= amplitudes.size() || i == j) {
        throw std::out_of_range("manifold_pair_concurrence: dot index out of range");
    }
    return std::min(1.0, 2.0 * std::abs(amplitudes[i]) * std::abs(amplitudes[j]));
}

double average_bipartite_concurrence(std::span<const std::complex<double>> amplitudes, std::size_t n_dots) {
    if (n_dots < 2) throw std::invalid_argument("average_bipartite_concurrence: need at least two dots");
    if (amplitudes.size() != n_dots + 1) throw std::invalid_argument("average_bipartite_concurrence: expected N+1 amplitudes");
    // sum_{i<j} 2|a_i||a_j| = (sum |a|)^2 - sum |a|^2
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 1; k <= n_dots; ++k) {
        const double m = std::abs(amplitudes[k]);
        sum += m;
        sum_sq += m * m;
    }
    const double pairs = 0.5 * static_cast<double>(n_dots) * static_cast<double>(n_dots - 1);
    return (sum * sum - sum_sq) / pairs;
}

}  // namespace plexq
