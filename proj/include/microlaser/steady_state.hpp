#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microlaser/kernel.hpp"
#include "microlaser/params.hpp"

namespace microlaser {

/// One node of an effective-coupling quadrature (g_tau value and weight).
struct CouplingNode {
    double g_tau = 0.0;
    double weight = 0.0;
};

struct SteadyStateOptions {
    double tail_threshold = 1e-12;
    int n_max_cap = 20000;
    double tolerance = 1e-10;  ///< on successive Delta'*tau iterates
    double damping = 0.5;
    double damping_min = 1.0 / 64.0;
    int max_iterations = 500;
    double trapping_threshold = 1e-9;
    /// Bracketed root search on the residual when damped iteration fails.
    bool bracket_fallback = true;
    /// Warm start for Delta'*tau; defaults to the passive detuning.
    std::optional<double> initial_delta_prime;
    /// Optional coupling quadrature. Empty means the single top-hat coupling
    /// params.g_tau; otherwise every kernel quantity is weight-averaged over
    /// the nodes. Not used by any acceptance check.
    std::vector<CouplingNode> coupling_average;
};

struct PhotonDistribution {
    std::vector<double> p;  ///< p_n, n = 0..n_max, sums to 1
    int n_max = 0;
    double mean_n = 0.0;
    std::optional<double> mandel_q;  ///< empty when <n> = 0
    double tail_mass = 0.0;          ///< bound on probability beyond n_max
    bool cap_reached = false;        ///< n_max_cap hit with tail above threshold
};

struct SteadyState {
    SystemParams params;
    EffectiveDetuning delta_prime;
    PhotonDistribution dist;
    kernel::PullingProfile profile;
    double mean_pulling = 0.0;    ///< <delta_n>*tau
    double pulling_std = 0.0;     ///< Delta delta_n * tau
    double mean_diffusion = 0.0;  ///< <D_n>*tau
    double residual = 0.0;        ///< Delta + <delta_n> - Delta', in 1/tau
    int iterations = 0;
    bool converged = false;
    double damping_used = 0.0;
    std::string method;  ///< "exact", "damped" or "bracket"
    bool nonunique = false;
    std::vector<int> trapping_flags;
    std::vector<std::string> warnings;

    /// w_n = (n+1) p_{n+1}, n = 0..n_max-1.
    std::vector<double> weights() const;
};

struct FieldStatistics {
    double mean_n = 0.0;
    std::optional<double> mandel_q;
    double mean_pulling = 0.0;
    double pulling_std = 0.0;
    double mean_diffusion = 0.0;
};

/// Detailed-balance photon distribution at a fixed effective detuning.
PhotonDistribution photon_distribution(const SystemParams& params, EffectiveDetuning dp,
                                       const SteadyStateOptions& opts = {});

/// Evaluates the distribution, kernel profile and weighted moments at dp
/// without iterating. Used by the solver and by residual scans.
SteadyState evaluate_at(const SystemParams& params, EffectiveDetuning dp,
                        const SteadyStateOptions& opts = {});

/// Solves Delta' = Delta + <delta_n>(Delta') by damped fixed-point iteration.
SteadyState self_consistent_detuning(const SystemParams& params,
                                     const SteadyStateOptions& opts = {});

FieldStatistics field_statistics(const SteadyState& state);

/// Mandel Q of a distribution; empty when the mean is zero.
std::optional<double> mandel_q(std::span<const double> p);

/// Residual Delta + <delta_n>(Delta') - Delta' in units of 1/tau.
double detuning_residual(const SystemParams& params, double delta_prime_tau,
                         const SteadyStateOptions& opts = {});

/// Lobes of a nonnegative weight sequence: maximal runs between separating
/// local minima, keeping maxima above `prominence` of the global maximum.
struct Lobe {
    int peak = 0;
    int begin = 0;  ///< inclusive
    int end = 0;    ///< exclusive
    double mass = 0.0;
};
std::vector<Lobe> find_lobes(std::span<const double> w, double prominence = 1e-3);

}  // namespace microlaser
