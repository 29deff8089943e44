#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "doctest.h"
#include "microlaser/oracle.hpp"
#include "microlaser/steady_state.hpp"

using namespace microlaser;

namespace {

double tv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) s += std::abs((i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0));
    return 0.5 * s;
}

// Null vector of the dense birth-death generator, solved with a full LU.
std::vector<double> dense_stationary(const SystemParams& p, EffectiveDetuning dp, int size) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
    for (int n = 0; n < size; ++n) {
        const double gain = n + 1 < size ? p.n_atoms * kernel::emission_probability(n, p, dp) : 0.0;
        const double loss = 2.0 * p.gamma_c_tau * n;
        a(n, n) -= gain + loss;
        if (n + 1 < size) a(n + 1, n) += gain;
        if (n > 0) a(n - 1, n) += loss;
    }
    a.row(size - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs(size - 1) = 1.0;
    const Eigen::VectorXd x = a.fullPivLu().solve(rhs);
    return {x.data(), x.data() + size};
}

}  // namespace

TEST_CASE("detailed balance matches dense stationary solve") {
    const SystemParams p = SystemParams::from_gamma_units(0.2, 0.05, 12.0, 3.0);
    const EffectiveDetuning dp(0.1);
    const auto d = photon_distribution(p, dp);
    const auto ref = dense_stationary(p, dp, d.n_max + 1);
    CHECK(tv(d.p, ref) < 1e-10);
    CHECK(std::accumulate(d.p.begin(), d.p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.tail_mass < 1e-12);
}

TEST_CASE("mandel q") {
    CHECK_FALSE(mandel_q(std::vector<double>{1.0, 0.0}).has_value());
    // Poisson with mean 2 has Q = 0.
    std::vector<double> p(60);
    p[0] = std::exp(-2.0);
    for (int n = 1; n < 60; ++n) p[n] = p[n - 1] * 2.0 / n;
    CHECK(*mandel_q(p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(*mandel_q(std::vector<double>{0.0, 0.0, 1.0}) == doctest::Approx(-1.0));
}

TEST_CASE("below threshold leaves the vacuum") {
    const SystemParams p = SystemParams::from_gamma_units(0.01, 0.049, 0.5, 0.0);
    const auto s = self_consistent_detuning(p);
    CHECK(s.converged);
    CHECK(s.dist.mean_n < 0.01);
}

TEST_CASE("resonance stays degenerate") {
    const SystemParams p{0.124, 0.049, 100.0, 0.0};
    const auto s = self_consistent_detuning(p);
    CHECK(s.converged);
    CHECK(std::abs(s.mean_pulling) < 1e-12 * p.gamma_c_tau);
    CHECK(s.delta_prime.value() == 0.0);
}

TEST_CASE("single-peaked operating point, frozen values") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 100.0, 14.76);
    const auto s = self_consistent_detuning(p);
    REQUIRE(s.converged);
    CHECK(std::abs(s.residual) < 1e-9);
    CHECK(s.delta_prime.value() / p.gamma_c_tau == doctest::Approx(13.72331).epsilon(1e-6));
    CHECK(s.dist.mean_n == doctest::Approx(388.355).epsilon(1e-5));
    CHECK(s.mean_pulling / p.gamma_c_tau == doctest::Approx(-1.03669).epsilon(1e-5));
    CHECK(find_lobes(s.weights()).size() == 1);
    // |Delta'| < |Delta| with the pulling opposite to Delta
    CHECK(std::abs(s.delta_prime.value()) < std::abs(p.delta_tau));
    CHECK(s.mean_pulling < 0.0);

    // Diagonal master equation evolved from vacuum lands on the same p_n.
    const auto ev = oracle::evolve_diagonal(p, s.delta_prime, 1e7 / p.gamma_c_tau);
    CHECK(ev.stationary);
    CHECK(tv(ev.dist.p, s.dist.p) < 1e-6);
}

TEST_CASE("fixed point holds for the returned detuning") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 10.0, -7.0);
    const auto s = self_consistent_detuning(p);
    REQUIRE(s.converged);
    CHECK(detuning_residual(p, s.delta_prime.value()) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    const auto f = field_statistics(s);
    CHECK(f.mean_n == s.dist.mean_n);
    CHECK(f.mean_pulling > 0.0);
}

TEST_CASE("warm start converges to the same point") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 100.0, 14.76);
    SteadyStateOptions o;
    o.initial_delta_prime = 13.0 * p.gamma_c_tau;
    const auto s = self_consistent_detuning(p, o);
    CHECK(s.delta_prime.value() == doctest::Approx(self_consistent_detuning(p).delta_prime.value()).epsilon(1e-9));
}

TEST_CASE("lobes of a two-humped sequence") {
    std::vector<double> w(200);
    for (int i = 0; i < 200; ++i) w[i] = std::exp(-0.5 * std::pow((i - 50) / 8.0, 2)) + 0.5 * std::exp(-0.5 * std::pow((i - 140) / 10.0, 2));
    const auto lobes = find_lobes(w);
    REQUIRE(lobes.size() == 2);
    CHECK(lobes[0].peak == 50);
    CHECK(lobes[1].peak == 140);
    CHECK(lobes[0].mass / lobes[1].mass == doctest::Approx(8.0 / 5.0).epsilon(1e-3));
}
