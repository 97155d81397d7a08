#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plexq/constants.hpp"
#include "plexq/dynamics.hpp"
#include "plexq/errors.hpp"
#include "truncation.hpp"

using namespace plexq;
using Eigen::MatrixXcd;

namespace {

constexpr double hb = constants::hbar;

MatrixXcd random_density(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cd(nd(rng), nd(rng));
    MatrixXcd rho = a * a.adjoint();
    return rho / rho.trace();
}

ParameterSet lossless(ParameterSet p) {
    p.gamma1 = p.gamma2_star = p.gamma_pl = 0.0;
    return p;
}

Trajectory synthetic(const std::vector<double>& t, const std::function<double(double)>& f) {
    Trajectory tr;
    tr.reserve(1, t.size());
    tr.dot_population.assign(1, {});
    for (double x : t) {
        tr.time.push_back(x);
        tr.dot_population[0].push_back(f(x));
        tr.plasmon_population.push_back(0.5 * f(x));
        tr.dipole.push_back(0.0);
        tr.norm_or_trace.push_back(1.0);
    }
    return tr;
}

std::vector<double> grid(double t0, double t1, double dt) {
    std::vector<double> t;
    for (std::size_t k = 0; t0 + k * dt <= t1 + 1e-9; ++k) t.push_back(t0 + k * dt);
    return t;
}

}  // namespace

TEST_CASE("Lindblad right-hand side: amplitude damping") {
    const auto b = build_basis(1, 2);  // index = 2 s + q
    const double gamma = 0.37;
    const OperatorMatrix h(MatrixXcd::Zero(4, 4), b, true);
    const OperatorMatrix c(std::sqrt(gamma) * oracle::annihilation(2, 1), b);
    MatrixXcd rho = MatrixXcd::Zero(4, 4);
    rho(2, 2) = 1.0;
    const MatrixXcd d = lindblad_rhs(rho, h, {c});
    CHECK(std::abs(d(2, 2) - cd(-gamma)) < 1e-15);
    CHECK(std::abs(d(0, 0) - cd(gamma)) < 1e-15);
    CHECK(std::abs(d.trace()) < 1e-15);
}

TEST_CASE("Lindblad right-hand side: pure dephasing") {
    const auto b = build_basis(1, 2);
    const double g2 = 0.0123;
    const MatrixXcd s = oracle::lowering(2, 1, 1);
    const OperatorMatrix h(MatrixXcd::Zero(4, 4), b, true);
    const OperatorMatrix c(std::sqrt(2.0 * g2) * s.adjoint() * s, b);
    MatrixXcd rho = MatrixXcd::Zero(4, 4);
    rho(0, 0) = 0.6;
    rho(1, 1) = 0.4;
    rho(1, 0) = cd(0.2, 0.3);
    rho(0, 1) = std::conj(rho(1, 0));
    const MatrixXcd d = lindblad_rhs(rho, h, {c});
    CHECK(std::abs(d(0, 0)) < 1e-16);
    CHECK(std::abs(d(1, 1)) < 1e-16);
    CHECK(std::abs(d(1, 0) - (-g2) * rho(1, 0)) < 1e-16);
}

TEST_CASE("Lindblad right-hand side is traceless and checks shapes") {
    auto p = parameter_set_1(2);
    const auto b = build_basis(2, 4);
    const auto h = build_system_hamiltonian(p, b, drive_from(p), 50.0, true);
    const auto c = build_collapse_operators(p, b);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const MatrixXcd d = lindblad_rhs(random_density(b.dim(), seed), h, c);
        CHECK(std::abs(d.trace()) < 1e-14);
        CHECK((d - d.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    }
    CHECK_THROWS_AS(lindblad_rhs(MatrixXcd::Identity(3, 3), h, c), std::invalid_argument);
}

TEST_CASE("interaction-picture generators reproduce the lab-frame equations") {
    auto p = parameter_set_1(2);
    p.g = {0.0108, 0.0071};
    p.E_L = 3e-6;
    const auto b = build_basis(2, 4);
    const auto drive = drive_from(p);
    const auto c = build_collapse_operators(p, b);
    const LindbladGenerator gen(p, b, drive);
    const EffectiveSchrodinger schr(p, b, drive);
    const Eigen::VectorXd& e = gen.energies();
    const MatrixXcd dmat = e.cast<cd>().asDiagonal();
    const cd minus_i_hb(0.0, -1.0 / hb);

    for (double t : {0.0, 37.5, 50.0, 61.2}) {
        const MatrixXcd rho = random_density(b.dim(), 11);
        const auto h = build_system_hamiltonian(p, b, drive, t, true);
        const MatrixXcd lab = lindblad_rhs(rho, h, c);
        MatrixXcd rhs_i;
        gen.apply(t, to_interaction_picture(rho, e, t), rhs_i);
        const MatrixXcd via_picture = minus_i_hb * (dmat * rho - rho * dmat) + to_lab_frame(rhs_i, e, t);
        CHECK((via_picture - lab).cwiseAbs().maxCoeff() < 1e-12 * lab.cwiseAbs().maxCoeff());

        Eigen::VectorXcd psi = random_density(b.dim(), 3).col(0);
        const auto hc = build_effective_hamiltonian(p, b, drive, t, true);
        const Eigen::VectorXcd lab_psi = minus_i_hb * (hc.m * psi);
        Eigen::VectorXcd phi_dot;
        schr.apply(t, to_interaction_picture(psi, e, t), phi_dot);
        const Eigen::VectorXcd via = minus_i_hb * (dmat * psi) + to_lab_frame(phi_dot, e, t);
        CHECK((via - lab_psi).cwiseAbs().maxCoeff() < 1e-12 * lab_psi.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("vacuum Rabi oscillation") {
    auto p = lossless(parameter_set_1(1));
    p.E_L = 0.0;
    const auto b = build_basis(1, 5);
    PropagationOptions opt;
    opt.t_end = 400.0;
    const double period = constants::pi * hb / 0.0108;
    CHECK(period == doctest::Approx(191.4).epsilon(1e-3));

    for (Solver s : {Solver::nonhermitian, Solver::lindblad}) {
        const auto tr = propagate(dot_excited_wave_packet(b, 1), p, b, s, drive_from(p), opt);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const double c = std::cos(0.0108 * tr.time[k] / hb);
            worst = std::max(worst, std::abs(tr.dot_population[0][k] - c * c));
            worst = std::max(worst, std::abs(tr.plasmon_population[k] - (1.0 - c * c)));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("ground state without drive is stationary") {
    auto p = parameter_set_1(1);
    p.E_L = 0.0;
    const auto b = build_basis(1, 5);
    PropagationOptions opt;
    opt.t_end = 100.0;
    const auto tr = propagate_lindblad(ground_density_matrix(b), p, b, drive_from(p), opt);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        CHECK(tr.dot_population[0][k] == 0.0);
        CHECK(tr.plasmon_population[k] == 0.0);
        CHECK(tr.dipole[k] == 0.0);
        CHECK(tr.norm_or_trace[k] == 1.0);
    }
}

TEST_CASE("Hermitian limit conserves the norm over 2500 fs") {
    auto p = lossless(parameter_set_1(1));
    p.E_L = 1e-5;
    const auto b = build_basis(1, 5);
    PropagationOptions opt;
    opt.t_end = 2500.0;
    opt.record.stride = 200;
    const auto tr = propagate_nonhermitian(basis_wave_packet(b, 0), p, b, drive_from(p), opt);
    double worst = 0.0;
    for (double n : tr.norm_or_trace) worst = std::max(worst, std::abs(n - 1.0));
    CHECK(worst < 1e-10);
}

TEST_CASE("Hermitian limit: both backends agree") {
    auto p = lossless(parameter_set_1(1));
    p.E_L = 1e-5;
    const auto b = build_basis(1, 5);
    PropagationOptions opt;
    opt.t_end = 150.0;
    const auto nh = propagate_nonhermitian(basis_wave_packet(b, 0), p, b, drive_from(p), opt);
    const auto l = propagate(basis_wave_packet(b, 0), p, b, Solver::lindblad, drive_from(p), opt);
    REQUIRE(nh.size() == l.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < nh.size(); ++k) {
        worst = std::max(worst, std::abs(nh.dot_population[0][k] - l.dot_population[0][k]));
        worst = std::max(worst, std::abs(nh.plasmon_population[k] - l.plasmon_population[k]));
        worst = std::max(worst, std::abs(nh.dipole[k] - l.dipole[k]) / 2990.0);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("no-dephasing limit: Lindblad excited block equals the wave packet projector") {
    auto p = parameter_set_2(2);
    p.gamma2_star = 0.0;
    const auto b = build_basis(2, 5);
    PropagationOptions opt;
    opt.t_end = 300.0;
    opt.record.keep_states = true;
    opt.record.state_stride = 50;
    const auto psi0 = dot_excited_wave_packet(b, 1);
    const auto nh = propagate_nonhermitian(psi0, p, b, drive_from(p), opt);
    const auto l = propagate_lindblad(pure_density_matrix(psi0), p, b, drive_from(p), opt);
    REQUIRE(nh.snapshots.size() == l.snapshots.size());
    REQUIRE(nh.snapshots.size() > 5);
    double worst = 0.0;
    for (std::size_t k = 0; k < nh.snapshots.size(); ++k) {
        const auto& psi = std::get<WavePacket>(nh.snapshots[k].state).psi;
        const auto& rho = std::get<DensityMatrix>(l.snapshots[k].state).rho;
        const MatrixXcd proj = psi * psi.adjoint();
        worst = std::max(worst, (rho - proj).bottomRightCorner(b.dim() - 1, b.dim() - 1).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("with dephasing the wave packet populations stay below Lindblad") {
    const auto p = parameter_set_2(2);
    const auto b = build_basis(2, 5);
    PropagationOptions opt;
    opt.t_end = 300.0;
    const auto psi0 = dot_excited_wave_packet(b, 1);
    const auto nh = propagate(psi0, p, b, Solver::nonhermitian, drive_from(p), opt);
    const auto l = propagate(psi0, p, b, Solver::lindblad, drive_from(p), opt);
    for (std::size_t k = 0; k < nh.size(); ++k) {
        for (std::size_t j = 0; j < 2; ++j) CHECK(nh.dot_population[j][k] <= l.dot_population[j][k] + 1e-6);
        CHECK(nh.plasmon_population[k] <= l.plasmon_population[k] + 1e-6);
        CHECK(nh.norm_or_trace[k] <= 1.0 + 1e-8);
    }
}

TEST_CASE("Lindblad diagnostics stay within tolerance under drive") {
    auto p = parameter_set_1(2);
    p.E_L = 5e-6;
    const auto b = build_basis(2, 6);
    PropagationOptions opt;
    opt.t_end = 200.0;
    const auto tr = propagate_lindblad(ground_density_matrix(b), p, b, drive_from(p), opt);
    CHECK(tr.diagnostics.max_trace_error < 1e-8);
    CHECK(tr.diagnostics.max_hermiticity_error < 1e-10);
    CHECK(tr.diagnostics.min_eigenvalue > -1e-8);
}

TEST_CASE("record grid and final state") {
    auto p = parameter_set_1(1);
    const auto b = build_basis(1, 5);
    PropagationOptions opt;
    opt.t_end = 10.0;
    opt.dt = 0.01;
    opt.record.stride = 7;
    const auto tr = propagate_nonhermitian(basis_wave_packet(b, 0), p, b, drive_from(p), opt);
    REQUIRE(tr.size() >= 2);
    CHECK(tr.time.front() == 0.0);
    for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr.time[k] - tr.time[k - 1] == doctest::Approx(0.07));
    CHECK(tr.final_state.t == doctest::Approx(10.0));
}

TEST_CASE("propagation argument errors") {
    auto p = parameter_set_1(1);
    const auto b = build_basis(1, 5);
    PropagationOptions opt;
    opt.dt = 0.0;
    CHECK_THROWS_AS(propagate_nonhermitian(basis_wave_packet(b, 0), p, b, drive_from(p), opt), std::invalid_argument);
    opt = {};
    opt.t_end = 1.0;
    CHECK_THROWS_AS(propagate_nonhermitian(basis_wave_packet(build_basis(1, 4), 0), p, b, drive_from(p), opt),
                    std::invalid_argument);
    CHECK_THROWS_AS(propagate(ground_density_matrix(b), p, b, Solver::nonhermitian, drive_from(p), opt),
                    std::invalid_argument);
}

TEST_CASE("steady-state detection") {
    SUBCASE("constant trajectory is steady from the first record") {
        const auto tr = synthetic(grid(5.0, 300.0, 1.0), [](double) { return 0.3; });
        const auto ts = detect_steady_state(tr, 50.0, 1e-6);
        REQUIRE(ts.has_value());
        CHECK(*ts == 5.0);
    }
    SUBCASE("exponential decay never settles") {
        // over 50 fs exp(-t/100) varies by ~0.4 of its mean
        const auto tr = synthetic(grid(0.0, 500.0, 0.5), [](double t) { return std::exp(-t / 100.0); });
        CHECK_FALSE(detect_steady_state(tr, 50.0, 1e-6).has_value());
    }
    SUBCASE("relaxation followed by a plateau") {
        // range over a 20 fs window is 2 e^{-t/10} sinh(1) / mean; below 1e-3 once t > ~80 fs
        const auto tr = synthetic(grid(0.0, 400.0, 0.5), [](double t) { return 1.0 + std::exp(-t / 10.0); });
        const auto ts = detect_steady_state(tr, 20.0, 1e-3);
        REQUIRE(ts.has_value());
        // brute force over trailing windows, for both columns of the synthetic record
        const auto t = grid(0.0, 400.0, 0.5);
        double expected = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            double lo = 1e300, hi = -1e300, sum = 0.0;
            std::size_t n = 0;
            for (std::size_t m = 0; m <= k; ++m) {
                if (t[m] < t[k] - 20.0 - 1e-9) continue;
                const double v = 1.0 + std::exp(-t[m] / 10.0);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
                sum += v;
                ++n;
            }
            if (hi - lo >= 1e-3 * sum / n) expected = t[k] + 0.5;
        }
        CHECK(expected > 50.0);
        CHECK(std::abs(*ts - expected) <= 0.5);
    }
    SUBCASE("invalid arguments") {
        const auto tr = synthetic(grid(0.0, 10.0, 1.0), [](double) { return 1.0; });
        CHECK_THROWS_AS(detect_steady_state(tr, 0.0, 1e-3), std::invalid_argument);
        CHECK_THROWS_AS(detect_steady_state(tr, 5.0, 0.0), std::invalid_argument);
        SteadyStateOptions o;
        o.smoothing = -1.0;
        CHECK_THROWS_AS(detect_steady_state(tr, 5.0, 1e-3, o), std::invalid_argument);
    }
    SUBCASE("smoothing removes a fast ripple") {
        const double period = 2.0;
        auto f = [&](double t) { return 0.4 * (1.0 + 0.04 * std::sin(2.0 * constants::pi * t / period)); };
        const auto tr = synthetic(grid(0.0, 400.0, 0.05), f);
        CHECK_FALSE(detect_steady_state(tr, 100.0, 1e-3).has_value());
        SteadyStateOptions o;
        o.smoothing = period;
        const auto ts = detect_steady_state(tr, 100.0, 1e-3, o);
        // the first period is only partially averaged, so windows reaching back to it fail
        REQUIRE(ts.has_value());
        CHECK(*ts > 100.0);
        CHECK(*ts <= 100.0 + period + 0.05);
    }
}

TEST_CASE("Fock truncation convergence check") {
    const auto start = [](const BasisDescriptor& b) -> QuantumState { return ground_density_matrix(b); };
    PropagationOptions opt;
    opt.t_end = 120.0;

    const auto weak = parameter_set_1(1);
    CHECK(testing::truncation_change(weak, 5, Solver::lindblad, start, opt) < 1e-9);

    // a strong pulse puts several quanta in the plasmon; two levels are not enough
    auto strong = parameter_set_1(1);
    strong.E_L = 4e-5;
    CHECK(testing::truncation_change(strong, 2, Solver::lindblad, start, opt) > 1e-3);
}
