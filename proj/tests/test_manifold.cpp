#include <doctest.h>

#include <cmath>
#include <complex>

#include "plexq/constants.hpp"
#include "plexq/dynamics.hpp"
#include "plexq/entanglement.hpp"
#include "plexq/manifold.hpp"

using namespace plexq;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double hb = constants::hbar;

ParameterSet lossless(ParameterSet p) {
    p.gamma1 = p.gamma2_star = p.gamma_pl = 0.0;
    return p;
}

VectorXcd dot_excited(std::size_t n, std::size_t j) {
    VectorXcd v = VectorXcd::Zero(static_cast<Eigen::Index>(n + 1));
    v(static_cast<Eigen::Index>(j)) = 1.0;
    return v;
}

// single-excitation components of a full-space wave packet: plasmon, dot 1..N
VectorXcd project(const Eigen::VectorXcd& psi, const BasisDescriptor& b) {
    const std::size_t n = b.n_dots();
    VectorXcd out(static_cast<Eigen::Index>(n + 1));
    out(0) = psi(b.index(1, std::vector<int>(n, 0)));
    for (std::size_t j = 1; j <= n; ++j) {
        std::vector<int> q(n, 0);
        q[j - 1] = 1;
        out(j) = psi(b.index(0, q));
    }
    return out;
}

double full_space_deviation(const ParameterSet& p, double t_end, std::size_t state_stride) {
    const auto b = build_basis(static_cast<long>(p.n_dots()), 3);
    PropagationOptions opt;
    opt.t_end = t_end;
    opt.record.keep_states = true;
    opt.record.state_stride = state_stride;
    const auto tr = propagate_nonhermitian(dot_excited_wave_packet(b, 1), p, b, drive_from(p), opt);
    const ManifoldPropagator prop(build_manifold_hamiltonian(p));
    double worst = 0.0;
    for (const auto& snap : tr.snapshots) {
        const VectorXcd a = prop.evolve(dot_excited(p.n_dots(), 1), snap.t);
        const VectorXcd f = project(std::get<WavePacket>(snap.state).psi, b);
        worst = std::max(worst, (a - f).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

TEST_CASE("two-dot manifold matrix for parameter set 2") {
    const auto p = parameter_set_2(2);
    const auto h = build_manifold_hamiltonian(p);
    const double gamma = 2.0 * 0.0017 + 666e-9;
    REQUIRE(h.dim() == 3);
    CHECK(std::abs(h.m(0, 0) - cd(1.44, -0.033 / 2.0)) < 1e-15);
    CHECK(std::abs(h.m(1, 1) - cd(1.44, -gamma / 2.0)) < 1e-15);
    CHECK(std::abs(h.m(2, 2) - cd(1.44, -gamma / 2.0)) < 1e-15);
    CHECK(h.m(0, 1) == cd(0.0167));
    CHECK(h.m(2, 0) == cd(0.0167));
    CHECK(h.m(1, 2) == cd(0.0));
    CHECK_THROWS_AS(build_manifold_hamiltonian(p, {}), std::invalid_argument);
}

TEST_CASE("manifold matrix structure for sampled couplings") {
    const auto p = parameter_set_2(2);
    const auto g = sample_couplings(0.0167, 0.0167, 12, 9);
    const auto h = build_manifold_hamiltonian(p, g);
    CHECK((h.m - h.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(h.m.diagonal().imag().maxCoeff() <= 0.0);
    const Eigen::Index n = static_cast<Eigen::Index>(g.size());
    const MatrixXcd dots = h.m.bottomRightCorner(n, n);
    CHECK((dots - MatrixXcd(dots.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    const ManifoldPropagator prop(h);
    CHECK(prop.eigenvalues().imag().maxCoeff() <= 1e-15);
}

TEST_CASE("zero-loss eigenvalues: omega0 and omega0 +- sqrt(2) g") {
    const auto p = lossless(parameter_set_2(2));
    const ManifoldPropagator prop(build_manifold_hamiltonian(p));
    std::vector<double> ev;
    for (const auto& e : prop.eigenvalues()) {
        CHECK(std::abs(e.imag()) < 1e-15);
        ev.push_back(e.real());
    }
    std::sort(ev.begin(), ev.end());
    const double s = std::sqrt(2.0) * 0.0167;
    CHECK(ev[0] == doctest::Approx(1.44 - s).epsilon(1e-14));
    CHECK(ev[1] == doctest::Approx(1.44).epsilon(1e-14));
    CHECK(ev[2] == doctest::Approx(1.44 + s).epsilon(1e-14));
}

TEST_CASE("antisymmetric dot state is an exact eigenvector") {
    const auto p = parameter_set_2(2);
    const auto h = build_manifold_hamiltonian(p);
    VectorXcd v(3);
    v << 0.0, 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    const cd lambda(p.omega0, -p.Gamma() / 2.0);
    CHECK((h.m * v - lambda * v).cwiseAbs().maxCoeff() < 1e-12);

    const ManifoldPropagator prop(h);
    double closest = 1.0;
    for (const auto& e : prop.eigenvalues()) closest = std::min(closest, std::abs(e - lambda));
    CHECK(closest < 1e-12);
    // the dark state decays at Gamma alone
    const VectorXcd vt = prop.evolve(v, 300.0);
    CHECK(vt.squaredNorm() == doctest::Approx(std::exp(-p.Gamma() * 300.0 / hb)).epsilon(1e-12));
}

TEST_CASE("collective coupling: bright splitting is 2 sqrt(N) g") {
    for (std::size_t n : {2, 5, 50}) {
        const auto p = lossless(parameter_set_2(n));
        const ManifoldPropagator prop(build_manifold_hamiltonian(p));
        double lo = 1e9, hi = -1e9;
        for (const auto& e : prop.eigenvalues()) {
            lo = std::min(lo, e.real());
            hi = std::max(hi, e.real());
        }
        CHECK(std::abs((hi - lo) - 2.0 * std::sqrt(static_cast<double>(n)) * 0.0167) < 1e-10);
        CHECK_FALSE(prop.uses_fallback());
    }
}

TEST_CASE("eigen-propagation basics") {
    const auto p = parameter_set_2(3);
    const auto h = build_manifold_hamiltonian(p, {0.0167, 0.01, -0.02});
    const VectorXcd psi0 = dot_excited(3, 2);
    CHECK((eigen_propagate(h, psi0, 0.0) - psi0).cwiseAbs().maxCoeff() == 0.0);

    const auto hl = build_manifold_hamiltonian(lossless(p), {0.0167, 0.01, -0.02});
    double worst = 0.0;
    for (double t : {10.0, 500.0, 1234.5, 2500.0}) worst = std::max(worst, std::abs(eigen_propagate(hl, psi0, t).squaredNorm() - 1.0));
    CHECK(worst < 1e-12);

    const ManifoldPropagator prop(h);
    const auto many = prop.evolve(psi0, std::vector<double>{0.0, 5.0, 50.0});
    CHECK((many[2] - prop.evolve(psi0, 50.0)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(prop.evolve(VectorXcd::Zero(2), 1.0), std::invalid_argument);
}

TEST_CASE("manifold agrees with full-space wave-packet propagation") {
    SUBCASE("two identical dots, parameter set 2") {
        CHECK(full_space_deviation(parameter_set_2(2), 2500.0, 400) < 1e-8);
    }
    SUBCASE("three dots with unequal couplings") {
        auto p = parameter_set_2(3);
        p.g = {0.0167, 0.004, -0.011};
        CHECK(full_space_deviation(p, 600.0, 200) < 1e-8);
    }
}

TEST_CASE("RK4 fallback at an exceptional point") {
    // one dot: the 2x2 matrix is defective when g = (gamma_pl - Gamma) / 4
    const auto p = parameter_set_2(1);
    const double g = (p.gamma_pl - p.Gamma()) / 4.0;
    const auto h = build_manifold_hamiltonian(p, {g});
    const ManifoldPropagator prop(h);
    CHECK(prop.uses_fallback());
    CHECK(prop.eigenvector_condition() > ManifoldPropagator::kMaxEigenCondition);

    // closed form for a Jordan block: exp(-i lambda t) (1 - i t (H - lambda))
    const cd lambda = 0.5 * (h.m(0, 0) + h.m(1, 1));
    const MatrixXcd nil = h.m - lambda * MatrixXcd::Identity(2, 2);
    const VectorXcd psi0 = dot_excited(1, 1);
    for (double t : {0.0, 7.3, 100.0, 400.0}) {
        const VectorXcd exact =
            std::exp(cd(0.0, -t / hb) * lambda) * (psi0 - cd(0.0, t / hb) * (nil * psi0));
        CHECK((prop.evolve(psi0, t) - exact).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("coupling sampler") {
    CHECK(sample_couplings(0.0167, 0.0, 7, 1) == std::vector<double>(7, 0.0167));
    CHECK(sample_couplings(0.0167, 0.0167, 50, 2) == sample_couplings(0.0167, 0.0167, 50, 2));
    CHECK(sample_couplings(0.0167, 0.0167, 50, 2) != sample_couplings(0.0167, 0.0167, 50, 3));
    CHECK(sample_couplings(1.0, 1.0, 3, 4).size() == 3);
    CHECK_THROWS_AS(sample_couplings(0.0, -1.0, 3, 4), std::invalid_argument);

    const std::size_t n = 10000;
    const auto x = sample_couplings(0.0167, 0.0167, n, 12345);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean - 0.0167) < 3.0 * 0.0167 / std::sqrt(static_cast<double>(n)));
    CHECK(std::sqrt(var) == doctest::Approx(0.0167).epsilon(0.05));
}

TEST_CASE("fifty-dot scenario properties") {
    const auto p = parameter_set_2(2);
    ManifoldScenarioOptions opt;
    opt.t_end = 500.0;
    const auto hom = run_manifold_scenario(p, CouplingMode::homogeneous, 0, opt);
    const auto inh = run_manifold_scenario(p, CouplingMode::inhomogeneous, 2, opt);
    for (const auto* r : {&hom, &inh}) {
        REQUIRE(r->avg_concurrence.size() == 501);
        CHECK(r->avg_concurrence.front() == 0.0);
        for (double c : r->avg_concurrence) CHECK(c <= 0.04 + 1e-15);
        CHECK(r->trajectory.time.back() == doctest::Approx(500.0));
        CHECK(r->trajectory.n_dots() == 50);
        CHECK(r->trajectory.dot_population[0].front() == 1.0);
        CHECK_FALSE(r->used_fallback);
    }
    CHECK_FALSE(hom.has_negative_couplings);
    CHECK(inh.couplings == sample_couplings(0.0167, 0.0167, 50, 2));
    const auto again = run_manifold_scenario(p, CouplingMode::inhomogeneous, 2, opt);
    CHECK(again.avg_concurrence == inh.avg_concurrence);

    // concurrence samples equal the fast path on the recorded amplitudes
    const ManifoldPropagator prop(build_manifold_hamiltonian(p, hom.couplings));
    const VectorXcd a = prop.evolve(dot_excited(50, 1), 100.0);
    const std::vector<cd> amp(a.data(), a.data() + a.size());
    CHECK(hom.avg_concurrence[100] == doctest::Approx(average_bipartite_concurrence(amp, 50)).epsilon(1e-12));

    auto driven = p;
    driven.E_L = 1e-7;
    CHECK_THROWS_AS(run_manifold_scenario(driven, CouplingMode::homogeneous, 0, opt), std::invalid_argument);
    opt.n_dots = 1;
    CHECK_THROWS_AS(run_manifold_scenario(p, CouplingMode::homogeneous, 0, opt), std::invalid_argument);
}
