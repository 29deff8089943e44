#pragma once

#include <complex>
#include <vector>

#include "microlaser/params.hpp"

// Per-photon-number quantities of the quantum theory. Every function here is
// pure; all frequencies are in units of 1/tau.
namespace microlaser::kernel {

/// n-photon Rabi frequency Omega_n*tau = sqrt(4 g^2 (n+1) + Delta'^2).
double rabi_frequency(int n, const SystemParams& params, EffectiveDetuning dp);

/// Probability that an inverted atom emits while n photons are present.
double emission_probability(int n, const SystemParams& params, EffectiveDetuning dp);

/// mu_n/2 with no large-n approximation. Re = D_n*tau, -Im = delta_n*tau.
std::complex<double> mu_exact(int n, const SystemParams& params, EffectiveDetuning dp);

/// Large-n phase diffusion 2 r_a sin^2(g^2 tau / 2 Omega_n) + gamma_c / 4n.
/// Throws InvalidArgument for n = 0, where the expansion has no meaning.
double decay_approx(int n, const SystemParams& params, EffectiveDetuning dp);

/// Large-n pulling -r_a (g^2 Delta' tau / Omega_n^2) [1 - sin(Omega_n tau)/(Omega_n tau)].
double pulling_approx(int n, const SystemParams& params, EffectiveDetuning dp);

/// Same formula with Omega^2 = 4 g^2 m + Delta'^2 for a real photon number m.
/// pulling_approx(n) == pulling_at_photons(n + 1).
double pulling_at_photons(double photons, const SystemParams& params, EffectiveDetuning dp);

/// 1 - sin(x)/x, accurate down to x = 0.
double one_minus_sinc(double x);

/// xi(Phi) = (1 - sin(Phi)/Phi) / Phi^2, continuous at 0 with xi(0) = 1/6.
double xi(double phi);

/// Factors of <delta_n> = conventional * pump_ratio * xi(Phi).
struct PullingDecomposition {
    double conventional = 0.0;  ///< -gamma_c Delta' tau (units 1/tau)
    double pump_ratio = 0.0;    ///< N / N_th
    double xi = 0.0;            ///< xi(Phi)
    double phi = 0.0;           ///< Phi = sqrt(4 g^2 <n> + Delta'^2) tau

    double product() const { return conventional * pump_ratio * xi; }
};

/// Splits the mean pulling at photon number mean_n (assumed >> 1).
/// The product of the three factors equals half of pulling_at_photons(mean_n).
PullingDecomposition pulling_decomposition(const SystemParams& params, EffectiveDetuning dp,
                                           double mean_n);

struct ConventionalLimit {
    double mean_pulling = 0.0;          ///< quadrature result (1/tau)
    double closed_form = 0.0;           ///< -r_a g^2 Delta / (2 gamma_p (4 gamma_p^2 + Omega^2))
    double dwell_integral = 0.0;        ///< int t e^{-2 gamma_p t}(1 - sinc(Omega t)) dt, numeric
    double dwell_integral_exact = 0.0;  ///< Omega^2 / (4 gamma_p^2 (4 gamma_p^2 + Omega^2))
    double error_estimate = 0.0;        ///< absolute error estimate on mean_pulling
};

/// Averages the interaction-time dependent pulling over the dwell-time
/// distribution 2 gamma_p exp(-2 gamma_p t), using the passive detuning for
/// Delta'. gamma_p and omega are in units of 1/tau. Throws ConvergenceError
/// when the quadrature error estimate is not below 1e-10 relative.
ConventionalLimit conventional_limit_average(const SystemParams& params, double gamma_p,
                                             double omega);

/// Omega satisfying the conventional steady state 2 r_a g^2 / (4 gamma_p^2 + Omega^2) = 2 gamma_c.
/// Throws InvalidArgument if the pump is too weak for a real solution.
double conventional_steady_state_omega(const SystemParams& params, double gamma_p);

struct PullingProfile {
    EffectiveDetuning delta_prime;
    std::vector<double> omega_n;    ///< Omega_n * tau
    std::vector<double> d_n;        ///< D_n * tau
    std::vector<double> pulling_n;  ///< delta_n * tau
    int n_max = 0;
};

/// Tabulates Omega_n, D_n and delta_n (from mu_exact) for n = 0..n_max.
PullingProfile make_profile(const SystemParams& params, EffectiveDetuning dp, int n_max);

}  // namespace microlaser::kernel
