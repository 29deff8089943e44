#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microlaser/params.hpp"
#include "microlaser/spectrum.hpp"
#include "microlaser/steady_state.hpp"

namespace microlaser::oracle {

/// y' = A y with A tridiagonal. lower[0] and upper[size-1] are unused.
template <class T>
struct Tridiagonal {
    std::vector<T> lower, diag, upper;

    std::size_t size() const { return diag.size(); }
    void apply(std::span<const T> x, std::span<T> y) const;
    double max_abs_row_sum() const;
};

using RealTridiagonal = Tridiagonal<double>;
using ComplexTridiagonal = Tridiagonal<std::complex<double>>;

/// Photon-number generator on p_0..p_{size-1}. Emission out of the top level
/// is dropped so the truncated generator conserves probability.
RealTridiagonal diagonal_generator(const SystemParams& params, EffectiveDetuning dp, int size);

/// Generator of rho_n = rho_{n,n+1}, n = 0..size-1, in the frame rotating
/// with the converged Delta'.
ComplexTridiagonal offdiagonal_generator(const SystemParams& params, EffectiveDetuning dp, int size);

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 0.0;  ///< <= 0 selects 1e-14 * max|y(0)|
    long max_steps = 20'000'000;
    int stiff_trigger = 15;      ///< consecutive stiff-flagged steps before switching
    bool force_implicit = false;
};

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    bool implicit = false;
    double switch_time = std::numeric_limits<double>::quiet_NaN();
};

/// Integrates y' = A y from t0, calling `observe(i, t_out[i], y)` at every
/// output time (increasing, >= t0). Returning false from observe stops the
/// integration early. Dormand-Prince 5(4), switching to the L-stable SDIRK3
/// of Alexander with step-doubling error control once stiffness is detected.
/// Throws ConvergenceError on step-size collapse.
template <class T>
IntegratorStats integrate(const Tridiagonal<T>& a, std::vector<T>& y, double t0,
                          std::span<const double> t_out,
                          const std::function<bool(std::size_t, double, const std::vector<T>&)>& observe,
                          const IntegratorOptions& opts = {});

struct DiagonalResult {
    PhotonDistribution dist;
    double t_reached = 0.0;         ///< units of tau
    double derivative_norm = 0.0;   ///< ||dp/dt||_1 in 1/tau at t_reached
    bool stationary = false;        ///< derivative_norm < 1e-12 gamma_c
    double max_trace_error = 0.0;   ///< max |sum p - 1| over checkpoints
    IntegratorStats stats;
};

/// Evolves the photon-number master equation from vacuum at fixed Delta'
/// until stationary or t_end (units of tau). size <= 0 takes the truncation
/// of the detailed-balance distribution plus a margin.
DiagonalResult evolve_diagonal(const SystemParams& params, EffectiveDetuning dp, double t_end,
                               int size = 0, const IntegratorOptions& opts = {});

struct OffDiagonalState {
    std::vector<std::complex<double>> rho1;
    double t = 0.0;
};

/// rho_n(0) = sqrt(n+1) p_{n+1}.
OffDiagonalState initial_offdiagonal(const PhotonDistribution& dist);

struct CorrelationSamples {
    std::vector<double> t;  ///< units of tau
    std::vector<std::complex<double>> g1;
    IntegratorStats stats;
};

CorrelationSamples evolve_offdiagonal(const OffDiagonalState& state0, const SystemParams& params,
                                      EffectiveDetuning dp, std::span<const double> t_grid,
                                      const IntegratorOptions& opts = {});

/// Writes "t_tau,re_g1,im_g1" rows.
void write_correlation_csv(std::ostream& os, const CorrelationSamples& samples);

struct TailFit {
    std::complex<double> rate;  ///< g1 ~ exp(rate t), units of 1/tau
    std::size_t first_sample = 0;
};

/// Exponential fit over the last tenth of uniformly spaced samples.
TailFit fit_tail(const CorrelationSamples& samples);

struct OracleSpectrum {
    Spectrum spectrum;
    TailFit tail;
};

/// One-sided transform Re int_0^inf g1(t) e^{-i nu t} dt with piecewise-linear
/// (Filon) quadrature and an exponential tail from the last tenth of samples.
/// raw_density is scaled to the analytic path's units. Samples must be
/// uniformly spaced and start at t = 0.
OracleSpectrum oracle_spectrum(const CorrelationSamples& samples, const GridSpec& grid,
                               double gamma_c_tau);

struct ModeComparison {
    int n_peak = 0;
    double decay_fit = 0.0;      ///< units of gamma_c
    double decay_exact = 0.0;
    double rotation_fit = 0.0;   ///< units of gamma_c
    double rotation_exact = 0.0;
    double decay_rel_error = 0.0;
    double rotation_rel_error = 0.0;
    /// Late-time rotation minus <delta_n>, units of gamma_c.
    double phase_rotation_residual = 0.0;
};

ModeComparison compare_dominant_mode(const SteadyState& state, const TailFit& tail);

struct ValidationOptions {
    std::optional<GridSpec> grid;
    double decay_times = 10.0;   ///< evolution length in units of 1/<D_n>
    double phase_step = 0.05;    ///< max rotation per sample interval
    int min_samples = 4096;
    IntegratorOptions integrator;
};

struct ValidationReport {
    double tv_distance = 0.0;          ///< diagonal oracle vs detailed balance
    DiagonalResult diagonal;
    CorrelationSamples correlation;
    double correlation_window = 0.0;   ///< 3/<D_n>, units of tau
    double correlation_max_error = 0.0;  ///< max |oracle - ansatz| / <n> over the window
    Spectrum analytic;
    OracleSpectrum oracle;
    double spectral_l1 = 0.0;          ///< L1(raw analytic - raw oracle) / analytic mass
    ModeComparison mode;
    std::vector<std::string> warnings;
};

/// Runs the full oracle comparison for a solved steady state.
ValidationReport validate_state(const SteadyState& state, const ValidationOptions& opts = {});

}  // namespace microlaser::oracle
