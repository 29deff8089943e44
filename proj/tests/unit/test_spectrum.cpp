#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "microlaser/errors.hpp"
#include "microlaser/spectrum.hpp"

using namespace microlaser;

TEST_CASE("grid spec") {
    GridSpec g{-1.0, 1.0, 5};
    CHECK(g.values() == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
    CHECK_THROWS_AS((GridSpec{1.0, -1.0, 5}).validate(), InvalidArgument);
    CHECK_THROWS_AS((GridSpec{-1.0, 1.0, 1}).validate(), InvalidArgument);
}

TEST_CASE("correlation at t = 0 is the mean photon number") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 30.0, 5.0);
    const auto s = self_consistent_detuning(p);
    CHECK(correlation_g1(s, 0.0).real() == doctest::Approx(s.dist.mean_n).epsilon(1e-12));
    CHECK(correlation_g1(s, 0.0).imag() == 0.0);
    CHECK(std::abs(correlation_g1(s, 5.0 / s.mean_diffusion)) < std::abs(correlation_g1(s, 1.0 / s.mean_diffusion)));
}

TEST_CASE("raw density carries pi <n>") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 40.0, 8.0);
    const auto s = self_consistent_detuning(p);
    const double c = s.mean_pulling / p.gamma_c_tau;
    // Lorentzian tails decay as 1/x^2, so the grid has to be very wide.
    const auto sp = build_spectrum(s, GridSpec{c - 4000.0, c + 4000.0, 400001});
    CHECK(trapezoid(sp.grid, sp.raw_density) == doctest::Approx(std::numbers::pi * s.dist.mean_n).epsilon(2e-3));
    double mx = 0.0;
    for (double v : sp.density) mx = std::max(mx, v);
    CHECK(mx == doctest::Approx(1.0));
}

TEST_CASE("resonant spectrum is a single Lorentzian") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> gd(0.08, 0.3), nd(20.0, 300.0);
    for (int k = 0; k < 5; ++k) {
        const SystemParams p{gd(rng), 0.049, nd(rng), 0.0};
        const auto s = self_consistent_detuning(p);
        const auto sp = build_spectrum(s);
        const auto fit = fit_lorentzian(sp.grid, sp.density);
        CHECK(fit.ok);
        CHECK(fit.rms_residual < 1e-3);
        CHECK(std::abs(fit.center) < 1e-9);
        CHECK(core_second_moment_ratio(sp.grid, sp.density, fit) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("fit recovers a synthetic Lorentzian") {
    std::vector<double> x, y;
    for (int i = 0; i < 801; ++i) {
        x.push_back(-4.0 + 0.01 * i);
        const double u = x.back() - 0.3;
        y.push_back(0.25 / (0.25 + u * u));
    }
    const auto f = fit_lorentzian(x, y);
    CHECK(f.center == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(f.hwhm == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(f.height == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(core_second_moment_ratio(x, y, f) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gaussian core exceeds the lorentzian fit") {
    std::vector<double> x, y;
    for (int i = 0; i < 2001; ++i) {
        x.push_back(-5.0 + 0.005 * i);
        y.push_back(std::exp(-0.5 * x.back() * x.back()));
    }
    const auto f = fit_lorentzian(x, y);
    CHECK(core_second_moment_ratio(x, y, f) > 1.0);
    CHECK(second_moment(x, y) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(first_moment(x, y) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("peak analysis splits two peaks") {
    std::vector<double> x, y;
    for (int i = 0; i < 4001; ++i) {
        x.push_back(-10.0 + 0.005 * i);
        const double a = x.back() + 4.0, b = x.back() - 1.0;
        y.push_back(2.0 / (1.0 + a * a) + 0.05 / (0.0025 + b * b) * 0.05);
    }
    normalize_peak(y);
    const auto peaks = peak_analysis(x, y);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].center == doctest::Approx(-4.0).epsilon(1e-3));
    CHECK(peaks[1].center == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(peaks[0].hwhm > peaks[1].hwhm);
    CHECK(peaks[0].area_share + peaks[1].area_share == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single-peaked operating point") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 100.0, 14.76);
    const auto s = self_consistent_detuning(p);
    const auto sp = build_spectrum(s);
    REQUIRE(sp.peaks.size() == 1);
    CHECK(sp.peaks[0].center < 0.0);
    CHECK(sp.peaks[0].center == doctest::Approx(-1.0346).epsilon(1e-3));
    const auto f = fit_lorentzian(sp.grid, sp.density);
    CHECK(core_second_moment_ratio(sp.grid, sp.density, f) > 1.0);
}

TEST_CASE("narrow grid warns") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 100.0, 14.76);
    const auto s = self_consistent_detuning(p);
    const auto sp = build_spectrum(s, GridSpec{-1.04, -1.03, 11});
    CHECK_FALSE(sp.warnings.empty());
}
