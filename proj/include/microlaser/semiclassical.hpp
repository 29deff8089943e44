#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "microlaser/params.hpp"

namespace microlaser::semiclassical {

struct BlochState {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 1.0;
    double t = 0.0;  ///< units of tau

    double norm() const;
};

/// Closed-form Bloch vector for an atom injected fully inverted, at time t
/// (units of tau, 0 <= t <= 1), field amplitude a = sqrt(n), frequency shift
/// delta (units of 1/tau).
BlochState bloch_solution(double t, double a, double delta_tau, const SystemParams& params);

/// Bloch right-hand side (ds1, ds2, ds3)/dt in units of 1/tau; used by the
/// ODE cross-check.
void bloch_rhs(const double s[3], double ds[3], double a, double delta_tau,
               const SystemParams& params);

/// N/(2 gamma_c tau) * 4g^2 n/(4g^2 n + D'^2) * sin^2(sqrt(g^2 n + D'^2/4)), D' = Delta + delta.
double intensity_gain(double n, double delta_tau, const SystemParams& params);

/// n - intensity_gain(n, delta).
double intensity_residual(double n, double delta_tau, const SystemParams& params);

/// -N g^2 D'/Phi^2 (1 - sin Phi/Phi), Phi^2 = 4 g^2 n + D'^2.
double pulling_rhs(double n, double delta_tau, const SystemParams& params);

struct PullingRoot {
    double delta_tau = 0.0;
    int roots_found = 1;
    int iterations = 0;
    std::string method;  ///< "trivial", "damped" or "bracket"
    std::vector<std::string> warnings;
};

/// Solves delta = pulling_rhs(n, delta). Returns the smallest-|delta| root.
PullingRoot pulling_fixed_point(double n, const SystemParams& params);

struct Branch {
    double n = 0.0;
    double delta_tau = 0.0;
    int branch_index = 0;
    double residual_intensity = 0.0;
    double residual_frequency = 0.0;
    bool stable = false;  ///< d(gain - loss)/dn < 0

    double delta_prime_tau(const SystemParams& p) const { return p.delta_tau + delta_tau; }
};

struct BranchOptions {
    /// Upper end of the n scan; <= 0 selects N_ex, which bounds every root.
    double n_scan_max = 0.0;
    int log_points = 2048;
    int linear_points = 64;
    double tolerance = 1e-10;
};

struct BranchSet {
    std::vector<Branch> branches;  ///< ordered by n, n = 0 branch first
    double n_scan_max = 0.0;
    int scan_points = 0;
    std::vector<std::string> warnings;
};

BranchSet solve_branches(const SystemParams& params, const BranchOptions& opts = {});

/// Dense row-major fields over (delta row, n column).
struct SurfaceGrid {
    std::vector<double> n_axis;
    std::vector<double> delta_axis;  ///< units of 1/tau
    std::vector<double> intensity;   ///< N from the intensity equation
    std::vector<double> pulling;     ///< N from the frequency equation
    std::vector<std::uint8_t> intensity_defined;
    std::vector<std::uint8_t> pulling_defined;
    double passive_delta_tau = 0.0;

    std::size_t rows() const { return delta_axis.size(); }
    std::size_t cols() const { return n_axis.size(); }
    std::size_t at(std::size_t row, std::size_t col) const { return row * n_axis.size() + col; }
};

/// N(n, delta) for given (g, gamma_c, Delta); params.n_atoms is ignored.
double intensity_surface(double n, double delta_tau, const SystemParams& params);
double pulling_surface(double n, double delta_tau, const SystemParams& params);

SurfaceGrid surface_grids(const SystemParams& params, std::pair<double, double> n_range,
                          std::pair<double, double> delta_range, int n_points, int delta_points);

struct SurfacePoint {
    double n = 0.0;
    double delta_tau = 0.0;
};

/// Points where both surfaces equal n_atoms, from per-cell sign analysis of
/// (surface - n_atoms) with bilinear refinement. Cells touching undefined
/// points are skipped.
std::vector<SurfacePoint> surface_intersections(const SurfaceGrid& grid, double n_atoms);

}  // namespace microlaser::semiclassical
