#include "microlaser/kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "microlaser/errors.hpp"

namespace microlaser::kernel {

double rabi_frequency(int n, const SystemParams& params, EffectiveDetuning dp) {
    const double g = params.g_tau;
    const double d = dp.value();
    return std::sqrt(4.0 * g * g * (n + 1.0) + d * d);
}

double emission_probability(int n, const SystemParams& params, EffectiveDetuning dp) {
    const double g = params.g_tau;
    const double omega = rabi_frequency(n, params, dp);
    const double s = std::sin(0.5 * omega);
    return 4.0 * g * g * (n + 1.0) / (omega * omega) * s * s;
}

std::complex<double> mu_exact(int n, const SystemParams& params, EffectiveDetuning dp) {
    const double ra = params.injection_tau();
    const double g = params.g_tau;
    const double gc = params.gamma_c_tau;
    const double d = dp.value();
    const double nn = n;

    const double om0 = rabi_frequency(n, params, dp);
    const double om1 = rabi_frequency(n + 1, params, dp);
    const double c0 = std::cos(0.5 * om0), s0 = std::sin(0.5 * om0);
    const double c1 = std::cos(0.5 * om1), s1 = std::sin(0.5 * om1);

    const double re = c0 * c1 + d * d / (om0 * om1) * s0 * s1 +
                      4.0 * g * g * std::sqrt((nn + 1.0) * (nn + 2.0)) / (om0 * om1) * s0 * s1 -
                      1.0;
    const double im = -d / om1 * c0 * s1 + d / om0 * c1 * s0;

    // -mu_n/2 = r_a {...} + 2 gamma_c sqrt(n(n+1)) - gamma_c (2n+1)
    const std::complex<double> minus_half_mu =
        ra * std::complex<double>(re, im) + 2.0 * gc * std::sqrt(nn * (nn + 1.0)) -
        gc * (2.0 * nn + 1.0);
    return -minus_half_mu;
}

double decay_approx(int n, const SystemParams& params, EffectiveDetuning dp) {
    if (n < 1) throw InvalidArgument("decay_approx requires n >= 1; use mu_exact at n = 0");
    const double g = params.g_tau;
    const double omega = rabi_frequency(n, params, dp);
    const double s = std::sin(g * g / (2.0 * omega));
    return 2.0 * params.injection_tau() * s * s + params.gamma_c_tau / (4.0 * n);
}

double one_minus_sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 0.1) {
        const double x2 = x * x;
        // x^2/3! - x^4/5! + x^6/7! - x^8/9! + x^10/11!
        return x2 * (1.0 / 6.0 -
                     x2 * (1.0 / 120.0 -
                           x2 * (1.0 / 5040.0 - x2 * (1.0 / 362880.0 - x2 / 39916800.0))));
    }
    return 1.0 - std::sin(x) / x;
}

double pulling_at_photons(double photons, const SystemParams& params, EffectiveDetuning dp) {
    const double g = params.g_tau;
    const double d = dp.value();
    const double omega2 = 4.0 * g * g * photons + d * d;
    if (omega2 == 0.0) return 0.0;
    const double omega = std::sqrt(omega2);
    return -params.injection_tau() * g * g * d / omega2 * one_minus_sinc(omega);
}

double pulling_approx(int n, const SystemParams& params, EffectiveDetuning dp) {
    return pulling_at_photons(n + 1.0, params, dp);
}

double xi(double phi) {
    if (phi < 0.1) {
        const double p2 = phi * phi;
        return 1.0 / 6.0 -
               p2 * (1.0 / 120.0 - p2 * (1.0 / 5040.0 - p2 * (1.0 / 362880.0 - p2 / 39916800.0)));
    }
    return (1.0 - std::sin(phi) / phi) / (phi * phi);
}

PullingDecomposition pulling_decomposition(const SystemParams& params, EffectiveDetuning dp,
                                           double mean_n) {
    const double g = params.g_tau;
    const double d = dp.value();
    PullingDecomposition out;
    out.conventional = -params.gamma_c_tau * d;
    out.pump_ratio = params.n_atoms / params.threshold_atoms();
    out.phi = std::sqrt(4.0 * g * g * mean_n + d * d);
    out.xi = xi(out.phi);
    return out;
}

namespace {

// int_0^inf t e^{-2 gp t} (1 - sinc(omega t)) / omega^2 dt, finite as omega -> 0.
struct DwellQuadrature {
    double value = 0.0;
    double error = 0.0;
};

DwellQuadrature dwell_quadrature(double gamma_p, double omega) {
    using boost::math::quadrature::gauss_kronrod;
    // In u = 2 gp t the integrand t e^{-2 gp t}(1 - sinc(Omega t))/Omega^2 becomes
    // u^3 e^{-u} xi(kappa u) / (2 gp)^4, which is O(1) for every (gp, Omega).
    const double kappa = omega / (2.0 * gamma_p);
    auto integrand = [kappa](double u) { return u * u * u * std::exp(-u) * xi(kappa * u); };

    // u^3 e^{-u} is below 1e-25 of its peak by u = 80.
    const double u_end = 80.0;
    const double width = kappa > 0.0 ? std::min(1.0, 2.0 * std::numbers::pi / kappa) : 1.0;
    double value = 0.0, error = 0.0;
    for (double a = 0.0; a < u_end; a += width) {
        const double b = std::min(a + width, u_end);
        double err = 0.0;
        value += gauss_kronrod<double, 31>::integrate(integrand, a, b, 3, 1e-12, &err);
        error += err;
    }
    const double scale = std::pow(2.0 * gamma_p, -4);
    DwellQuadrature q;
    q.value = value * scale;
    q.error = error * scale;
    return q;
}

}  // namespace

ConventionalLimit conventional_limit_average(const SystemParams& params, double gamma_p,
                                             double omega) {
    if (!(gamma_p > 0.0)) throw InvalidArgument("gamma_p must be > 0");
    if (!(omega >= 0.0)) throw InvalidArgument("omega must be >= 0");
    const double ra = params.injection_tau();
    const double g2 = params.g_tau * params.g_tau;
    const double delta = params.delta_tau;

    const DwellQuadrature q = dwell_quadrature(gamma_p, omega);
    // <delta> = int 2 gp e^{-2 gp t} (-r_a g^2 Delta t / Omega^2)(1 - sinc) dt
    const double scale = -ra * g2 * delta * 2.0 * gamma_p;

    ConventionalLimit out;
    out.mean_pulling = scale * q.value;
    out.error_estimate = std::abs(scale) * q.error;
    out.closed_form = -ra * g2 * delta / (2.0 * gamma_p * (4.0 * gamma_p * gamma_p + omega * omega));
    out.dwell_integral = omega * omega * q.value;
    out.dwell_integral_exact =
        omega * omega / (4.0 * gamma_p * gamma_p * (4.0 * gamma_p * gamma_p + omega * omega));

    if (q.error > 1e-10 * std::abs(q.value))
        throw ConvergenceError("dwell-time quadrature did not converge", q.error / std::abs(q.value));
    return out;
}

double conventional_steady_state_omega(const SystemParams& params, double gamma_p) {
    const double omega2 = params.injection_tau() * params.g_tau * params.g_tau / params.gamma_c_tau -
                          4.0 * gamma_p * gamma_p;
    if (!(omega2 >= 0.0))
        throw InvalidArgument("pump below the conventional laser threshold for this gamma_p");
    return std::sqrt(omega2);
}

PullingProfile make_profile(const SystemParams& params, EffectiveDetuning dp, int n_max) {
    PullingProfile out;
    out.delta_prime = dp;
    out.n_max = n_max;
    out.omega_n.resize(n_max + 1);
    out.d_n.resize(n_max + 1);
    out.pulling_n.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        out.omega_n[n] = rabi_frequency(n, params, dp);
        const auto mu = mu_exact(n, params, dp);
        out.d_n[n] = mu.real();
        out.pulling_n[n] = -mu.imag();
    }
    return out;
}

}  // namespace microlaser::kernel
