#include "plexq/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "plexq/constants.hpp"

namespace plexq {

OperatorMatrix::OperatorMatrix(Eigen::MatrixXcd matrix, BasisDescriptor b, bool is_hermitian)
    : m(std::move(matrix)), basis(std::move(b)), hermitian(is_hermitian) {
    if (static_cast<std::size_t>(m.rows()) != basis.dim() ||
        static_cast<std::size_t>(m.cols()) != basis.dim()) {
        throw std::invalid_argument("OperatorMatrix: shape does not match basis dimension");
    }
}

OperatorMatrix OperatorMatrix::adjoint() const {
    return OperatorMatrix(m.adjoint(), basis, hermitian);
}

double OperatorMatrix::hermiticity_error() const {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix identity(const BasisDescriptor& basis) {
    const auto n = static_cast<Eigen::Index>(basis.dim());
    return OperatorMatrix(Eigen::MatrixXcd::Identity(n, n), basis, true);
}

OperatorMatrix plasmon_annihilation(const BasisDescriptor& basis) {
    const auto n = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
    const std::size_t stride = basis.dot_space();
    for (std::size_t flat = stride; flat < basis.dim(); ++flat) {
        const double s = static_cast<double>(basis.plasmon_number(flat));
        b(static_cast<Eigen::Index>(flat - stride), static_cast<Eigen::Index>(flat)) = std::sqrt(s);
    }
    return OperatorMatrix(std::move(b), basis, false);
}

OperatorMatrix dot_lowering(const BasisDescriptor& basis, std::size_t j) {
    if (j < 1 || j > basis.n_dots()) throw std::invalid_argument("dot_lowering: dot index out of range");
    const auto n = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(n, n);
    const std::size_t bit = std::size_t{1} << (basis.n_dots() - j);
    for (std::size_t flat = 0; flat < basis.dim(); ++flat) {
        if (flat & bit) sigma(static_cast<Eigen::Index>(flat ^ bit), static_cast<Eigen::Index>(flat)) = 1.0;
    }
    return OperatorMatrix(std::move(sigma), basis, false);
}

OperatorMatrix plasmon_number(const BasisDescriptor& basis) {
    const auto n = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t flat = 0; flat < basis.dim(); ++flat) {
        num(static_cast<Eigen::Index>(flat), static_cast<Eigen::Index>(flat)) =
            static_cast<double>(basis.plasmon_number(flat));
    }
    return OperatorMatrix(std::move(num), basis, true);
}

OperatorMatrix dot_number(const BasisDescriptor& basis, std::size_t j) {
    if (j < 1 || j > basis.n_dots()) throw std::invalid_argument("dot_number: dot index out of range");
    const auto n = static_cast<Eigen::Index>(basis.dim());
    Eigen::MatrixXcd num = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t flat = 0; flat < basis.dim(); ++flat) {
        num(static_cast<Eigen::Index>(flat), static_cast<Eigen::Index>(flat)) =
            static_cast<double>(basis.dot_occupation(flat, j));
    }
    return OperatorMatrix(std::move(num), basis, true);
}

void check_consistent(const ParameterSet& params, const BasisDescriptor& basis) {
    params.validate();
    if (params.n_dots() != basis.n_dots()) {
        throw std::invalid_argument("coupling list length does not match the basis dot count");
    }
}

OperatorMatrix dipole_operator(const ParameterSet& params, const BasisDescriptor& basis) {
    check_consistent(params, basis);
    const Eigen::MatrixXcd b = plasmon_annihilation(basis).m;
    Eigen::MatrixXcd mu = params.d_pl * (b + b.adjoint());
    for (std::size_t j = 1; j <= basis.n_dots(); ++j) {
        const Eigen::MatrixXcd s = dot_lowering(basis, j).m;
        mu += params.d0 * (s + s.adjoint());
    }
    return OperatorMatrix(std::move(mu), basis, true);
}

OperatorMatrix bare_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis) {
    check_consistent(params, basis);
    const Eigen::MatrixXcd b = plasmon_annihilation(basis).m;
    const Eigen::MatrixXcd bdag = b.adjoint();
    Eigen::MatrixXcd h = params.omega_pl * (bdag * b);
    for (std::size_t j = 1; j <= basis.n_dots(); ++j) {
        const Eigen::MatrixXcd s = dot_lowering(basis, j).m;
        const Eigen::MatrixXcd sdag = s.adjoint();
        h += params.omega0 * (sdag * s);
        h += params.g[j - 1] * (s * bdag + sdag * b);
    }
    return OperatorMatrix(std::move(h), basis, true);
}

OperatorMatrix build_system_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                        const DriveSpec& drive, double t, bool include_drive) {
    OperatorMatrix h = bare_hamiltonian(params, basis);
    if (include_drive && drive.active()) {
        const double field = field_at(drive, t);
        h.m -= (constants::debye_au_to_eV * field) * dipole_operator(params, basis).m;
    }
    return h;
}

OperatorMatrix build_system_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                        double t, bool include_drive) {
    return build_system_hamiltonian(params, basis, drive_from(params), t, include_drive);
}

std::vector<OperatorMatrix> build_collapse_operators(const ParameterSet& params,
                                                     const BasisDescriptor& basis) {
    check_consistent(params, basis);
    const double emission = std::sqrt(params.gamma1 / constants::hbar);
    const double dephasing = std::sqrt(2.0 * params.gamma2_star / constants::hbar);
    const double damping = std::sqrt(params.gamma_pl / constants::hbar);

    std::vector<OperatorMatrix> ops;
    ops.reserve(2 * basis.n_dots() + 1);
    for (std::size_t j = 1; j <= basis.n_dots(); ++j) {
        const Eigen::MatrixXcd s = dot_lowering(basis, j).m;
        ops.emplace_back(emission * s, basis, false);
        ops.emplace_back(dephasing * (s.adjoint() * s), basis, true);
    }
    ops.emplace_back(damping * plasmon_annihilation(basis).m, basis, false);
    return ops;
}

Eigen::MatrixXcd loss_operator(const std::vector<OperatorMatrix>& collapse) {
    if (collapse.empty()) return {};
    const auto n = collapse.front().m.rows();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& c : collapse) sum += c.m.adjoint() * c.m;
    return cd(0.0, -0.5 * constants::hbar) * sum;
}

OperatorMatrix build_effective_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                           const DriveSpec& drive, double t, bool include_drive) {
    OperatorMatrix h = build_system_hamiltonian(params, basis, drive, t, include_drive);
    h.m += loss_operator(build_collapse_operators(params, basis));
    h.hermitian = false;
    return h;
}

OperatorMatrix build_effective_hamiltonian(const ParameterSet& params, const BasisDescriptor& basis,
                                           double t, bool include_drive) {
    return build_effective_hamiltonian(params, basis, drive_from(params), t, include_drive);
}

}  // namespace plexq
