#include "plexq/manifold.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "plexq/constants.hpp"
#include "plexq/entanglement.hpp"

namespace plexq {

ManifoldHamiltonian build_manifold_hamiltonian(const ParameterSet& params, const std::vector<double>& couplings) {
    if (couplings.empty()) throw std::invalid_argument("manifold: at least one dot required");
    ParameterSet checked = params;
    checked.g = couplings;
    checked.validate();
    const auto n = static_cast<Eigen::Index>(couplings.size());
    ManifoldHamiltonian h{Eigen::MatrixXcd::Zero(n + 1, n + 1), couplings};
    h.m(0, 0) = cd(params.omega_pl, -0.5 * params.gamma_pl);
    for (Eigen::Index j = 1; j <= n; ++j) {
        h.m(j, j) = cd(params.omega0, -0.5 * params.Gamma());
        h.m(0, j) = couplings[static_cast<std::size_t>(j - 1)];
        h.m(j, 0) = couplings[static_cast<std::size_t>(j - 1)];
    }
    return h;
}

ManifoldHamiltonian build_manifold_hamiltonian(const ParameterSet& params) {
    return build_manifold_hamiltonian(params, params.g);
}

ManifoldPropagator::ManifoldPropagator(const ManifoldHamiltonian& h, double fallback_dt)
    : h_(h.m), fallback_dt_(fallback_dt) {
    const Eigen::Index n = h_.rows() - 1;
    const bool star = (h_.bottomRightCorner(n, n) - Eigen::MatrixXcd(h_.bottomRightCorner(n, n).diagonal().asDiagonal()))
                          .cwiseAbs()
                          .maxCoeff() == 0.0;
    const bool uniform_dots = star && (h_.diagonal().tail(n).array() == h_(1, 1)).all() &&
                              h_.col(0).tail(n).imag().cwiseAbs().maxCoeff() == 0.0;
    bool solved = false;
    if (uniform_dots && n > 1) {
        // Identical dots: an orthogonal Q with first column g/|g| leaves a 2x2
        // bright block and N-1 exactly degenerate dark states.
        const Eigen::VectorXd g = h_.col(0).tail(n).real();
        const double g_norm = g.norm();
        Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
        if (g_norm > 0.0) q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
        const double sign = g_norm > 0.0 && q.col(0).dot(g) < 0.0 ? -1.0 : 1.0;
        Eigen::Matrix2cd bright;
        bright << h_(0, 0), sign * g_norm, sign * g_norm, h_(1, 1);
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> small(bright);
        if (small.info() == Eigen::Success) {
            Eigen::MatrixXcd rotation = Eigen::MatrixXcd::Zero(n + 1, n + 1);
            rotation(0, 0) = 1.0;
            rotation.bottomRightCorner(n, n) = q.cast<cd>();
            Eigen::MatrixXcd inner = Eigen::MatrixXcd::Identity(n + 1, n + 1);
            inner.topLeftCorner(2, 2) = small.eigenvectors();
            vectors_ = rotation * inner;
            eigenvalues_ = Eigen::VectorXcd::Constant(n + 1, h_(1, 1));
            eigenvalues_.head(2) = small.eigenvalues();
            solved = true;
        }
    }
    if (!solved) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h_);
        if (solver.info() == Eigen::Success) {
            eigenvalues_ = solver.eigenvalues();
            vectors_ = solver.eigenvectors();
            solved = true;
        }
    }
    if (solved) {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors_);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1);
        condition_ = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    } else {
        condition_ = std::numeric_limits<double>::infinity();
    }
    if (!(condition_ <= kMaxEigenCondition)) {
        fallback_ = true;
        std::clog << "warning: manifold eigenvector matrix is ill-conditioned (cond = " << condition_
                  << "); using RK4 time stepping\n";
    } else {
        inverse_ = vectors_.inverse();
    }
}

Eigen::VectorXcd ManifoldPropagator::evolve(const Eigen::VectorXcd& psi0, double t) const {
    return evolve(psi0, std::vector<double>{t}).front();
}

std::vector<Eigen::VectorXcd> ManifoldPropagator::evolve(const Eigen::VectorXcd& psi0,
                                                         const std::vector<double>& times) const {
    if (psi0.size() != h_.rows()) throw std::invalid_argument("manifold: amplitude vector has wrong size");
    std::vector<Eigen::VectorXcd> out;
    out.reserve(times.size());
    if (!fallback_) {
        const Eigen::VectorXcd c0 = inverse_ * psi0;
        for (double t : times) {
            Eigen::VectorXcd c(c0.size());
            for (Eigen::Index k = 0; k < c.size(); ++k) {
                c(k) = c0(k) * std::exp(cd(0.0, -t / constants::hbar) * eigenvalues_(k));
            }
            out.push_back(t == 0.0 ? psi0 : Eigen::VectorXcd(vectors_ * c));
        }
        return out;
    }

    // RK4 on the shifted generator; the shift is restored as an exact phase.
    const double shift = h_.diagonal().real().mean();
    const Eigen::MatrixXcd k = cd(0.0, -1.0 / constants::hbar) *
                               (h_ - shift * Eigen::MatrixXcd::Identity(h_.rows(), h_.cols()));
    Eigen::VectorXcd psi = psi0;
    double t_now = 0.0;
    for (double t : times) {
        if (t < t_now) throw std::invalid_argument("manifold: times must be increasing");
        const auto steps = static_cast<std::size_t>(std::ceil((t - t_now) / fallback_dt_ - 1e-9));
        const double h = steps > 0 ? (t - t_now) / static_cast<double>(steps) : 0.0;
        for (std::size_t s = 0; s < steps; ++s) {
            const Eigen::VectorXcd k1 = k * psi;
            const Eigen::VectorXcd k2 = k * (psi + 0.5 * h * k1);
            const Eigen::VectorXcd k3 = k * (psi + 0.5 * h * k2);
            const Eigen::VectorXcd k4 = k * (psi + h * k3);
            psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        t_now = t;
        out.push_back(std::polar(1.0, -shift * t / constants::hbar) * psi);
    }
    return out;
}

Eigen::VectorXcd eigen_propagate(const ManifoldHamiltonian& h, const Eigen::VectorXcd& psi0, double t) {
    return ManifoldPropagator(h).evolve(psi0, t);
}

std::vector<double> sample_couplings(double mean, double std_dev, std::size_t n, std::uint64_t seed) {
    if (!(std_dev >= 0.0)) throw std::invalid_argument("sample_couplings: std must be >= 0");
    std::mt19937_64 engine(seed);
    auto uniform = [&engine] {
        // (0, 1]
        return (static_cast<double>(engine() >> 11) + 1.0) * 0x1.0p-53;
    };
    std::vector<double> out;
    out.reserve(n);
    while (out.size() < n) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * constants::pi * uniform();
        out.push_back(mean + std_dev * r * std::cos(phi));
        if (out.size() < n) out.push_back(mean + std_dev * r * std::sin(phi));
    }
    return out;
}

const char* coupling_mode_name(CouplingMode mode) {
    return mode == CouplingMode::homogeneous ? "homogeneous" : "inhomogeneous";
}

ManifoldRun run_manifold_scenario(const ParameterSet& params, CouplingMode mode, std::uint64_t seed,
                                  const ManifoldScenarioOptions& options) {
    if (params.E_L != 0.0) throw std::invalid_argument("manifold: the single-excitation engine requires E_L = 0");
    if (options.n_dots < 2) throw std::invalid_argument("manifold: need at least two dots");
    if (options.initial_dot < 1 || options.initial_dot > options.n_dots) {
        throw std::invalid_argument("manifold: initial dot out of range");
    }
    if (!(options.sample_dt > 0.0) || !(options.t_end > 0.0)) {
        throw std::invalid_argument("manifold: t_end and sample_dt must be > 0");
    }

    ManifoldRun run;
    run.mode = mode;
    run.seed = seed;
    run.couplings = mode == CouplingMode::homogeneous
                        ? std::vector<double>(options.n_dots, options.coupling_mean)
                        : sample_couplings(options.coupling_mean, options.coupling_std, options.n_dots, seed);
    for (double g : run.couplings) run.has_negative_couplings |= g < 0.0;

    const ManifoldHamiltonian h = build_manifold_hamiltonian(params, run.couplings);
    const ManifoldPropagator prop(h);
    run.used_fallback = prop.uses_fallback();

    const auto n_samples = static_cast<std::size_t>(std::llround(options.t_end / options.sample_dt)) + 1;
    std::vector<double> times(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) times[k] = static_cast<double>(k) * options.sample_dt;

    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.dim()));
    psi0(static_cast<Eigen::Index>(options.initial_dot)) = 1.0;
    const auto states = prop.evolve(psi0, times);

    Trajectory& traj = run.trajectory;
    traj.solver = Solver::nonhermitian;
    traj.reserve(options.n_dots, n_samples);
    run.avg_concurrence.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const Eigen::VectorXcd& a = states[k];
        traj.time.push_back(times[k]);
        for (std::size_t j = 1; j <= options.n_dots; ++j) {
            traj.dot_population[j - 1].push_back(std::norm(a(static_cast<Eigen::Index>(j))));
        }
        traj.plasmon_population.push_back(std::norm(a(0)));
        traj.dipole.push_back(0.0);
        traj.norm_or_trace.push_back(a.squaredNorm());
        run.avg_concurrence.push_back(
            average_bipartite_concurrence(std::span<const cd>(a.data(), static_cast<std::size_t>(a.size())), options.n_dots));
    }
    return run;
}

}  // namespace plexq
