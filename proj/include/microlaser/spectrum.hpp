#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microlaser/steady_state.hpp"

namespace microlaser {

/// Frequency grid for nu - omega_c, in units of gamma_c.
struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 0;

    void validate() const;
    std::vector<double> values() const;
    double spacing() const { return (max - min) / (points - 1); }
};

struct Peak {
    int index = 0;
    double center = 0.0;      ///< units of gamma_c
    double height = 0.0;      ///< normalized density
    double hwhm = 0.0;        ///< units of gamma_c
    double area_share = 0.0;  ///< fraction of the area on the grid
};

struct Spectrum {
    std::vector<double> grid;         ///< nu - omega_c in units of gamma_c
    std::vector<double> density;      ///< unit peak height
    std::vector<double> raw_density;  ///< integrates to pi <n> over an all-covering grid
    std::vector<Peak> peaks;
    int components_kept = 0;
    std::vector<std::string> warnings;
};

/// <a^dag(t) a(0)> = sum_n (n+1) p_{n+1} exp(-D_n t + i delta_n t), t in units of tau.
std::complex<double> correlation_g1(const SteadyState& state, double t_tau);

/// Centered on <delta_n>, spanning +-max(10 <D_n>, 6 Delta delta_n), 4096 points.
GridSpec default_grid(const SteadyState& state);

/// Closed-form Lorentzian sum. Throws Error when a trapping index carries
/// weight or a weighted D_n is not positive; those states need the oracle.
Spectrum build_spectrum(const SteadyState& state, std::optional<GridSpec> grid = std::nullopt);

std::vector<Peak> peak_analysis(std::span<const double> grid, std::span<const double> density,
                                double prominence = 0.01);
inline std::vector<Peak> peak_analysis(const Spectrum& spec, double prominence = 0.01) {
    return peak_analysis(spec.grid, spec.density, prominence);
}

/// Scales a density to unit maximum in place.
void normalize_peak(std::vector<double>& density);

double trapezoid(std::span<const double> x, std::span<const double> y);
double first_moment(std::span<const double> x, std::span<const double> y);
/// Central second moment of y over the grid.
double second_moment(std::span<const double> x, std::span<const double> y);

struct LorentzianFit {
    double center = 0.0;
    double hwhm = 0.0;
    double height = 0.0;
    double rms_residual = 0.0;
    double max_residual = 0.0;
    bool ok = false;

    double operator()(double x) const {
        const double u = x - center;
        return height * hwhm * hwhm / (hwhm * hwhm + u * u);
    }
};

/// Least-squares fit of height * w^2 / (w^2 + (x - c)^2).
LorentzianFit fit_lorentzian(std::span<const double> grid, std::span<const double> density);

/// Second moment of the density about the fit center over the fit's FWHM
/// core, divided by the same moment of the fitted Lorentzian. Exactly 1 for
/// a Lorentzian; above 1 for a flatter, Gaussian-like core.
double core_second_moment_ratio(std::span<const double> grid, std::span<const double> density,
                                const LorentzianFit& fit);

}  // namespace microlaser
