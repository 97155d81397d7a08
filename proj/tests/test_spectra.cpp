#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plexq/constants.hpp"
#include "plexq/errors.hpp"
#include "plexq/spectrum.hpp"

using namespace plexq;

namespace {

constexpr double hb = constants::hbar;

std::vector<double> uniform(double t0, double t1, double dt) {
    std::vector<double> t;
    for (std::size_t k = 0; t0 + k * dt <= t1 + 1e-9; ++k) t.push_back(t0 + k * dt);
    return t;
}

std::vector<double> pulse(const DriveSpec& d, const std::vector<double>& t) {
    std::vector<double> e;
    for (double x : t) e.push_back(field_at(d, x));
    return e;
}

// half-maximum crossing by linear interpolation
double crossing(const std::vector<double>& w, const std::vector<double>& s, std::size_t from, int step, double level) {
    for (std::size_t k = from; k > 0 && k + 1 < s.size(); k += step) {
        const std::size_t n = k + step;
        if (s[n] < level) return w[k] + (w[n] - w[k]) * (s[k] - level) / (s[k] - s[n]);
    }
    return std::nan("");
}

}  // namespace

TEST_CASE("drive field") {
    DriveSpec d{1e-6, 2.042, 50.0, 10.0, false};
    CHECK(field_at(d, 50.0) == doctest::Approx(1e-6 * std::cos(2.042 * 50.0 / hb)).epsilon(1e-14));
    CHECK(std::abs(field_at(d, 100.0)) < 1.4e-11 * 1e-6);
    CHECK(std::abs(field_at(d, 0.0)) < 1.4e-11 * 1e-6);
    d.cw_mode = true;
    for (double t : {0.0, 123.4, 2000.0}) CHECK(field_at(d, t) == 1e-6 * std::cos(2.042 * t / hb));
    CHECK(field_at(d, 0.0) == 1e-6);

    DriveSpec bad{1e-6, 2.042, 50.0, 0.0, false};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {-1e-6, 2.042, 50.0, 10.0, false};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("polarizability of an instantaneous response") {
    const DriveSpec d{1e-6, 2.042, 100.0, 10.0, false};
    const auto t = uniform(0.0, 200.0, 0.05);
    const auto e = pulse(d, t);
    std::vector<double> mu;
    for (double x : e) mu.push_back(7.5 * x);
    const SpectrumWindow win{1.85, 2.25, 0.001};
    const auto omega = win.grid();
    PolarizabilityOptions opt;
    const auto r = polarizability(mu, e, t, omega, opt);
    CHECK(r.masked_count == 0);
    for (const auto& a : r.alpha) {
        CHECK(a.real() == doctest::Approx(7.5 / std::sqrt(1.5)).epsilon(1e-12));
        CHECK(std::abs(a.imag()) < 1e-12);
    }

    // far outside the pulse bandwidth the field transform vanishes
    const std::vector<double> far{2.042, 6.0, 6.5};
    const auto rf = polarizability(mu, e, t, far, opt);
    CHECK(rf.masked_count == 2);
    CHECK_FALSE(rf.masked[0]);
}

TEST_CASE("polarizability is invariant under a global time shift") {
    const DriveSpec d{1e-6, 2.042, 50.0, 10.0, false};
    const auto t = uniform(0.0, 300.0, 0.05);
    const auto e = pulse(d, t);
    std::vector<double> mu;
    for (double x : t) mu.push_back(std::exp(-(x - 60.0) * (x - 60.0) / 400.0) * std::sin(2.0 * x / hb + 0.3));
    std::vector<double> shifted = t;
    for (double& x : shifted) x += 123.4;
    const auto omega = SpectrumWindow{1.85, 2.25, 0.002}.grid();
    const auto a = polarizability(mu, e, t, omega, {});
    const auto b = polarizability(mu, e, shifted, omega, {});
    for (std::size_t k = 0; k < omega.size(); ++k) CHECK(std::abs(a.alpha[k] - b.alpha[k]) <= 1e-8 * std::abs(a.alpha[k]));
}

TEST_CASE("polarizability input errors") {
    const DriveSpec d{1e-6, 2.042, 50.0, 10.0, false};
    const auto t = uniform(0.0, 100.0, 0.05);
    const auto e = pulse(d, t);
    const std::vector<double> omega{2.0};
    const std::vector<double> flat(t.size(), 1.0);
    CHECK_THROWS_AS(polarizability(flat, e, t, omega, {}), InsufficientPropagation);
    std::vector<double> bent = t;
    bent[10] += 0.01;
    CHECK_THROWS_AS(polarizability(e, e, bent, omega, {}), std::invalid_argument);
    CHECK_THROWS_AS(polarizability(std::vector<double>(3, 0.0), e, t, omega, {}), std::invalid_argument);

    // no field and no signal: every point masked
    const std::vector<double> zero(t.size(), 0.0);
    const auto r = polarizability(zero, zero, t, omega, {});
    CHECK(r.masked_count == 1);
}

TEST_CASE("direct Fourier sum") {
    const std::vector<double> t{0.0, 1.0, 2.0};
    const std::vector<double> x{1.0, 2.0, -1.0};
    const std::vector<double> w{0.5};
    const auto f = fourier_sum(x, t, w);
    std::complex<double> ref = 0.0;
    for (int k = 0; k < 3; ++k) ref += x[k] * std::exp(std::complex<double>(0.0, 0.5 * t[k] / hb));
    CHECK(std::abs(f[0] - ref) < 1e-14);
}

TEST_CASE("plasmon alone gives a Lorentzian of width gamma_pl") {
    auto p = parameter_set_1(1);
    p.g = {0.0};
    p.d0 = 0.0;
    const auto b = build_basis(1, 5);
    SpectrumOptions opt;
    opt.window = {1.6, 2.5, 0.001};
    opt.t_end = 300.0;
    const auto s = run_spectrum_scenario(p, b, Solver::nonhermitian, drive_from(p), opt);
    const auto top = static_cast<std::size_t>(std::max_element(s.sigma.begin(), s.sigma.end()) - s.sigma.begin());
    CHECK(s.omega[top] == doctest::Approx(2.042).epsilon(3e-3));
    const double half = 0.5 * s.sigma[top];
    const double fwhm = crossing(s.omega, s.sigma, top, 1, half) - crossing(s.omega, s.sigma, top, -1, half);
    CHECK(fwhm == doctest::Approx(0.150).epsilon(0.02));
}

TEST_CASE("linear response: halving the field leaves sigma unchanged") {
    const auto p = parameter_set_1(1);
    const auto b = build_basis(1, 5);
    auto half = p;
    half.E_L = 0.5 * p.E_L;
    SpectrumOptions opt;
    opt.window = {1.95, 2.15, 0.001};
    const auto s1 = run_spectrum_scenario(p, b, Solver::nonhermitian, drive_from(p), opt);
    const auto s2 = run_spectrum_scenario(half, b, Solver::nonhermitian, drive_from(half), opt);
    const double peak = *std::max_element(s1.sigma.begin(), s1.sigma.end());
    for (std::size_t k = 0; k < s1.sigma.size(); ++k) CHECK(std::abs(s1.sigma[k] - s2.sigma[k]) < 1e-3 * peak);
}

TEST_CASE("spectrum scenario rejects a CW drive") {
    auto p = parameter_set_1(1);
    p.cw_mode = true;
    CHECK_THROWS_AS(run_spectrum_scenario(p, build_basis(1, 5), Solver::nonhermitian, drive_from(p), {}),
                    std::invalid_argument);
}

TEST_CASE("dip analysis and spectrum CSV") {
    Spectrum s;
    s.omega = {1.0, 1.1, 1.2, 1.3, 1.4};
    s.sigma = {1.0, 3.0, 0.5, 2.0, 0.2};
    s.alpha.assign(5, {0.0, 1.0});
    s.masked = {0, 0, 0, 0, 1};
    const auto f = analyze_dip(s, 1.2, 0.05);
    REQUIRE(f.found);
    CHECK(f.dip_omega == 1.2);
    CHECK(f.depth() == doctest::Approx(2.5));
    CHECK_FALSE(analyze_dip(s, 1.05, 0.01).found);

    std::ostringstream os;
    write_spectrum_csv(os, s);
    const std::string out = os.str();
    CHECK(out.rfind("omega_eV,sigma_cm2,re_alpha,im_alpha,masked_flag\n", 0) == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 6);
}
