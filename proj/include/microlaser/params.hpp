#pragma once

#include <stdexcept>
#include <string>

namespace microlaser {

/// Dimensionless operating point of the microlaser. Every rate is multiplied
/// by the interaction time tau; the atomic injection rate r_a*tau equals the
/// mean intracavity atom number and is never stored separately.
struct SystemParams {
    double g_tau = 0.0;        ///< coupling g*tau
    double gamma_c_tau = 0.0;  ///< cavity half-width gamma_c*tau
    double n_atoms = 0.0;      ///< mean intracavity atom number N
    double delta_tau = 0.0;    ///< passive detuning (omega_c - omega_0)*tau

    /// Builds params from a detuning given in units of gamma_c, the
    /// convention used by every figure recipe.
    static SystemParams from_gamma_units(double g_tau, double gamma_c_tau, double n_atoms,
                                         double delta_over_gamma_c) {
        return SystemParams{g_tau, gamma_c_tau, n_atoms, delta_over_gamma_c * gamma_c_tau};
    }

    void validate() const;

    double injection_tau() const { return n_atoms; }
    double delta_over_gamma_c() const { return delta_tau / gamma_c_tau; }

    /// N_th = 2 gamma_c / (g^2 tau)
    double threshold_atoms() const { return 2.0 * gamma_c_tau / (g_tau * g_tau); }
    /// theta^2 = N g^2 tau / (2 gamma_c) = N / N_th
    double pump_theta_sq() const { return n_atoms * g_tau * g_tau / (2.0 * gamma_c_tau); }
    /// N_ex = N / (2 gamma_c tau), atoms per cavity lifetime. Also an upper
    /// bound on any steady-state photon number.
    double n_ex() const { return n_atoms / (2.0 * gamma_c_tau); }

    std::string describe() const;

    bool operator==(const SystemParams&) const = default;
};

/// Field-atom detuning Delta' * tau in the shifted steady state.
struct EffectiveDetuning {
    double delta_prime_tau = 0.0;

    explicit constexpr EffectiveDetuning(double v = 0.0) : delta_prime_tau(v) {}
    constexpr double value() const { return delta_prime_tau; }
};

}  // namespace microlaser
