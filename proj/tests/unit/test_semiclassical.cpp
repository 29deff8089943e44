#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "doctest.h"
#include "microlaser/kernel.hpp"
#include "microlaser/semiclassical.hpp"

using namespace microlaser;
namespace sc = microlaser::semiclassical;

TEST_CASE("bloch solution matches numerical integration") {
    const SystemParams p{0.124, 0.049, 100.0, 0.3};
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 3>;
    for (double a : {0.0, 3.0, 20.0}) {
        for (double delta : {-0.2, 0.0, 0.1}) {
            State s{0.0, 0.0, 1.0};
            auto rhs = [&](const State& x, State& dx, double) { sc::bloch_rhs(x.data(), dx.data(), a, delta, p); };
            odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-12, 1e-12), rhs,
                                       s, 0.0, 1.0, 1e-3);
            const auto b = sc::bloch_solution(1.0, a, delta, p);
            CHECK(b.s1 == doctest::Approx(s[0]).scale(1.0).epsilon(1e-9));
            CHECK(b.s2 == doctest::Approx(s[1]).scale(1.0).epsilon(1e-9));
            CHECK(b.s3 == doctest::Approx(s[2]).scale(1.0).epsilon(1e-9));
            CHECK(b.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("pulling rhs shares the kernel formula") {
    const SystemParams p{0.124, 0.049, 300.0, 0.4};
    const double d = -0.05;
    CHECK(sc::pulling_rhs(250.0, d, p) ==
          kernel::pulling_at_photons(250.0, p, EffectiveDetuning(p.delta_tau + d)));
}

TEST_CASE("pulling fixed point") {
    const SystemParams p{0.124, 0.049, 300.0, 0.4};
    const auto r = sc::pulling_fixed_point(200.0, p);
    CHECK(r.delta_tau == doctest::Approx(sc::pulling_rhs(200.0, r.delta_tau, p)).epsilon(1e-10));
    CHECK(r.delta_tau < 0.0);
    const auto z = sc::pulling_fixed_point(200.0, SystemParams{0.124, 0.049, 300.0, 0.0});
    CHECK(z.delta_tau == 0.0);
}

TEST_CASE("branches solve both equations") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 700.0, 5.0);
    const auto set = sc::solve_branches(p);
    REQUIRE(set.branches.size() >= 2);
    CHECK(set.branches.front().n == 0.0);
    CHECK_FALSE(set.branches.front().stable);
    for (const auto& b : set.branches) {
        if (b.n == 0.0) continue;
        CHECK(b.n <= p.n_ex());
        CHECK(std::abs(sc::intensity_residual(b.n, b.delta_tau, p)) < 1e-6 * b.n);
        CHECK(b.delta_tau == doctest::Approx(sc::pulling_rhs(b.n, b.delta_tau, p)).epsilon(1e-9));
    }
}

TEST_CASE("below threshold only the trivial branch is stable") {
    const auto p = SystemParams::from_gamma_units(0.124, 0.049, 3.0, 0.0);
    const auto set = sc::solve_branches(p);
    REQUIRE(set.branches.size() == 1);
    CHECK(set.branches[0].stable);
}

TEST_CASE("surfaces reproduce the equations they encode") {
    const SystemParams p{0.124, 0.049, 0.0, 0.653};
    const double n = 300.0, delta = -0.05;
    const double n1 = sc::intensity_surface(n, delta, p);
    const double n2 = sc::pulling_surface(n, delta, p);
    auto with = [&](double atoms) { return SystemParams{p.g_tau, p.gamma_c_tau, atoms, p.delta_tau}; };
    CHECK(sc::intensity_residual(n, delta, with(n1)) == doctest::Approx(0.0).scale(n).epsilon(1e-10));
    CHECK(sc::pulling_rhs(n, delta, with(n2)) == doctest::Approx(delta).epsilon(1e-10));
    // The delta = 0 line of the frequency surface carries N = 0.
    CHECK(sc::pulling_surface(n, 0.0, p) == 0.0);
}

TEST_CASE("surface intersections recover a branch") {
    const SystemParams p{0.124, 0.049, 100.0, 0.653};
    const auto set = sc::solve_branches(p);
    const auto grid = sc::surface_grids(p, {1.0, 1500.0}, {-0.3, 0.02}, 256, 256);
    const auto pts = sc::surface_intersections(grid, p.n_atoms);
    REQUIRE_FALSE(pts.empty());
    for (const auto& pt : pts) {
        double best = 1e300;
        for (const auto& b : set.branches)
            if (b.n > 0.0) best = std::min(best, std::abs(b.n - pt.n) / b.n);
        CHECK(best < 2e-2);
    }
}
