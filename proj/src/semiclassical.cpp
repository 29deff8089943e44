#include "microlaser/semiclassical.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "microlaser/errors.hpp"
#include "microlaser/kernel.hpp"

namespace microlaser::semiclassical {

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double phi_squared(double n, double delta_tau, const SystemParams& p) {
    const double dp = p.delta_tau + delta_tau;
    return 4.0 * p.g_tau * p.g_tau * n + dp * dp;
}

// (n - gain)/n, finite at n = 0.
double reduced_residual(double n, double delta_tau, const SystemParams& p) {
    const double phi = std::sqrt(phi_squared(n, delta_tau, p));
    const double s = sinc(0.5 * phi);
    return 1.0 - p.n_ex() * p.g_tau * p.g_tau * s * s;
}

template <class F>
double refine_root(F f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    std::uintmax_t max_iter = 200;
    auto tol = [](double u, double v) {
        return std::abs(u - v) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(1.0, std::max(std::abs(u), std::abs(v)));
    };
    const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, max_iter);
    return 0.5 * (r.first + r.second);
}

}  // namespace

double BlochState::norm() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }

BlochState bloch_solution(double t, double a, double delta_tau, const SystemParams& params) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("Bloch time must lie in [0, tau]");
    if (!(a >= 0.0)) throw InvalidArgument("field amplitude must be >= 0");
    const double dp = params.delta_tau + delta_tau;
    const double ga2 = 2.0 * params.g_tau * a;
    const double phi2 = ga2 * ga2 + dp * dp;
    BlochState out;
    out.t = t;
    if (phi2 == 0.0) return out;
    const double phi = std::sqrt(phi2);
    const double c = std::cos(phi * t);
    out.s1 = ga2 * dp / phi2 * (1.0 - c);
    out.s2 = ga2 / phi * std::sin(phi * t);
    out.s3 = (ga2 * ga2 * c + dp * dp) / phi2;
    return out;
}

void bloch_rhs(const double s[3], double ds[3], double a, double delta_tau,
               const SystemParams& params) {
    const double dp = params.delta_tau + delta_tau;
    const double ga2 = 2.0 * params.g_tau * a;
    ds[0] = dp * s[1];
    ds[1] = -dp * s[0] + ga2 * s[2];
    ds[2] = -ga2 * s[1];
}

double intensity_gain(double n, double delta_tau, const SystemParams& params) {
    if (!(n >= 0.0)) throw InvalidArgument("intensity must be >= 0");
    return n * (1.0 - reduced_residual(n, delta_tau, params));
}

double intensity_residual(double n, double delta_tau, const SystemParams& params) {
    return n - intensity_gain(n, delta_tau, params);
}

double pulling_rhs(double n, double delta_tau, const SystemParams& params) {
    if (!(n >= 0.0)) throw InvalidArgument("intensity must be >= 0");
    return kernel::pulling_at_photons(n, params, EffectiveDetuning(params.delta_tau + delta_tau));
}

PullingRoot pulling_fixed_point(double n, const SystemParams& params) {
    if (!(n >= 0.0)) throw InvalidArgument("intensity must be >= 0");
    PullingRoot out;
    const double big_delta = params.delta_tau;
    if (big_delta == 0.0 || params.n_atoms == 0.0) {
        out.method = "trivial";
        return out;
    }
    auto g = [&](double d) { return pulling_rhs(n, d, params) - d; };

    // Damped iteration from zero.
    double d = 0.0;
    bool damped_ok = false;
    for (int k = 0; k < 400; ++k) {
        const double step = 0.5 * g(d);
        d += step;
        out.iterations = k + 1;
        if (!std::isfinite(d)) break;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(big_delta))) {
            damped_ok = true;
            break;
        }
    }

    // Every root lies strictly between 0 and -Delta; scan for multiplicity.
    const double span = std::abs(big_delta);
    constexpr int kScan = 64;
    std::vector<std::pair<double, double>> brackets;
    double x0 = -span, g0 = g(x0);
    for (int i = 1; i <= kScan; ++i) {
        const double x1 = -span + 2.0 * span * i / kScan;
        const double g1 = g(x1);
        if (g0 == 0.0 || (g0 > 0.0) != (g1 > 0.0)) brackets.emplace_back(x0, x1);
        x0 = x1;
        g0 = g1;
    }
    if (brackets.empty()) throw Error("pulling fixed point: no root in [-|Delta|, |Delta|]");

    std::vector<double> roots;
    for (auto [a, b] : brackets) roots.push_back(refine_root(g, a, b, g(a), g(b)));
    std::sort(roots.begin(), roots.end(),
              [](double u, double v) { return std::abs(u) < std::abs(v); });
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [span](double u, double v) { return std::abs(u - v) < 1e-13 * span; }),
                roots.end());
    out.roots_found = static_cast<int>(roots.size());

    if (roots.size() > 1) {
        std::ostringstream os;
        os << "pulling fixed point has " << roots.size()
           << " roots at n=" << n << "; returning the smallest |delta|";
        out.warnings.push_back(os.str());
        out.delta_tau = roots.front();
        out.method = "bracket";
    } else if (damped_ok) {
        out.delta_tau = d;
        out.method = "damped";
    } else {
        out.delta_tau = roots.front();
        out.method = "bracket";
    }
    return out;
}

BranchSet solve_branches(const SystemParams& params, const BranchOptions& opts) {
    params.validate();
    BranchSet out;
    const double tol = opts.tolerance;

    Branch zero;
    zero.stable = reduced_residual(0.0, 0.0, params) > 0.0;
    out.branches.push_back(zero);
    if (params.n_atoms == 0.0) return out;

    const double n_hi = opts.n_scan_max > 0.0 ? opts.n_scan_max : params.n_ex();
    out.n_scan_max = n_hi;

    std::vector<double> grid;
    const double lin_end = std::min(1.0, n_hi);
    for (int i = 1; i < opts.linear_points; ++i) grid.push_back(lin_end * i / opts.linear_points);
    grid.push_back(lin_end);
    if (n_hi > 1.0) {
        const double ratio = std::log(n_hi);
        for (int i = 1; i <= opts.log_points; ++i) grid.push_back(std::exp(ratio * i / opts.log_points));
    }
    out.scan_points = static_cast<int>(grid.size());

    auto h = [&](double n) {
        const double d = pulling_fixed_point(n, params).delta_tau;
        return reduced_residual(n, d, params);
    };

    std::vector<double> hv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) hv[i] = h(grid[i]);

    struct Bracket {
        double a, b, fa, fb;
    };
    std::vector<Bracket> brackets;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid[i], b = grid[i + 1];
        const double fa = hv[i], fb = hv[i + 1];
        if (fa == 0.0) {
            brackets.push_back({a, a, fa, fa});
            continue;
        }
        if ((fa > 0.0) != (fb > 0.0) && fb != 0.0) {
            brackets.push_back({a, b, fa, fb});
            continue;
        }
        // A root pair hidden inside one cell shows up at the midpoint.
        const double m = 0.5 * (a + b);
        const double fm = h(m);
        if ((fm > 0.0) != (fa > 0.0) && fm != 0.0) {
            brackets.push_back({a, m, fa, fm});
            brackets.push_back({m, b, fm, fb});
            std::ostringstream os;
            os << "scan grid too coarse near n=" << m << " (cell [" << a << ", " << b
               << "], " << out.scan_points << " scan points); split at the midpoint";
            out.warnings.push_back(os.str());
        }
    }
    if (!hv.empty() && hv.back() == 0.0) brackets.push_back({grid.back(), grid.back(), 0.0, 0.0});

    for (const auto& br : brackets) {
        const double n = br.a == br.b ? br.a : refine_root(h, br.a, br.b, br.fa, br.fb);
        const auto pr = pulling_fixed_point(n, params);
        Branch b;
        b.n = n;
        b.delta_tau = pr.delta_tau;
        b.residual_intensity = intensity_residual(n, pr.delta_tau, params);
        b.residual_frequency = pulling_rhs(n, pr.delta_tau, params) - pr.delta_tau;
        b.stable = br.fb > br.fa;
        for (const auto& w : pr.warnings) out.warnings.push_back(w);
        if (std::abs(b.residual_intensity) >= tol * std::max(1.0, n)) {
            std::ostringstream os;
            os << "branch at n=" << n << " polished only to intensity residual "
               << b.residual_intensity;
            out.warnings.push_back(os.str());
        }
        out.branches.push_back(b);
    }
    std::sort(out.branches.begin(), out.branches.end(),
              [](const Branch& u, const Branch& v) { return u.n < v.n; });
    for (std::size_t i = 0; i < out.branches.size(); ++i)
        out.branches[i].branch_index = static_cast<int>(i);
    return out;
}

double intensity_surface(double n, double delta_tau, const SystemParams& params) {
    const double phi = std::sqrt(phi_squared(n, delta_tau, params));
    if (std::abs(std::sin(0.5 * phi)) < 1e-9 && phi > 0.0) return std::numeric_limits<double>::quiet_NaN();
    const double s = sinc(0.5 * phi);
    return 2.0 * params.gamma_c_tau / (params.g_tau * params.g_tau * s * s);
}

double pulling_surface(double n, double delta_tau, const SystemParams& params) {
    const double dp = params.delta_tau + delta_tau;
    if (std::abs(dp) < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    const double phi2 = phi_squared(n, delta_tau, params);
    const double phi = std::sqrt(phi2);
    return -delta_tau / dp * phi2 / (params.g_tau * params.g_tau * kernel::one_minus_sinc(phi));
}

SurfaceGrid surface_grids(const SystemParams& params, std::pair<double, double> n_range,
                          std::pair<double, double> delta_range, int n_points, int delta_points) {
    if (!(n_range.first >= 0.0 && n_range.second > n_range.first))
        throw InvalidArgument("surface n range must satisfy 0 <= min < max");
    if (!(delta_range.second > delta_range.first))
        throw InvalidArgument("surface delta range must satisfy min < max");
    if (n_points < 2 || delta_points < 2)
        throw InvalidArgument("surface resolution must be >= 2 per axis");

    SurfaceGrid out;
    out.passive_delta_tau = params.delta_tau;
    out.n_axis.resize(n_points);
    out.delta_axis.resize(delta_points);
    for (int i = 0; i < n_points; ++i)
        out.n_axis[i] = n_range.first + (n_range.second - n_range.first) * i / (n_points - 1);
    for (int j = 0; j < delta_points; ++j)
        out.delta_axis[j] =
            delta_range.first + (delta_range.second - delta_range.first) * j / (delta_points - 1);

    const std::size_t total = static_cast<std::size_t>(n_points) * delta_points;
    out.intensity.resize(total);
    out.pulling.resize(total);
    out.intensity_defined.resize(total);
    out.pulling_defined.resize(total);
    for (int j = 0; j < delta_points; ++j) {
        for (int i = 0; i < n_points; ++i) {
            const std::size_t k = out.at(j, i);
            const double v1 = intensity_surface(out.n_axis[i], out.delta_axis[j], params);
            const double v2 = pulling_surface(out.n_axis[i], out.delta_axis[j], params);
            out.intensity[k] = v1;
            out.pulling[k] = v2;
            out.intensity_defined[k] = std::isfinite(v1);
            out.pulling_defined[k] = std::isfinite(v2);
        }
    }
    return out;
}

namespace {

struct Bilinear {
    double f00, f10, f01, f11;
    double operator()(double u, double v) const {
        return f00 * (1 - u) * (1 - v) + f10 * u * (1 - v) + f01 * (1 - u) * v + f11 * u * v;
    }
    double du(double v) const { return (f10 - f00) * (1 - v) + (f11 - f01) * v; }
    double dv(double u) const { return (f01 - f00) * (1 - u) + (f11 - f10) * u; }
    bool straddles() const {
        const double lo = std::min({f00, f10, f01, f11});
        const double hi = std::max({f00, f10, f01, f11});
        return lo <= 0.0 && hi >= 0.0;
    }
};

bool solve_cell(const Bilinear& a, const Bilinear& b, double& u, double& v) {
    constexpr double kStarts[5][2] = {{0.5, 0.5}, {0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.9, 0.9}};
    for (const auto& s : kStarts) {
        u = s[0];
        v = s[1];
        for (int it = 0; it < 40; ++it) {
            const double fa = a(u, v), fb = b(u, v);
            const double j11 = a.du(v), j12 = a.dv(u), j21 = b.du(v), j22 = b.dv(u);
            const double det = j11 * j22 - j12 * j21;
            if (det == 0.0 || !std::isfinite(det)) break;
            const double su = (fa * j22 - fb * j12) / det;
            const double sv = (fb * j11 - fa * j21) / det;
            u -= su;
            v -= sv;
            if (std::abs(su) + std::abs(sv) < 1e-13) {
                constexpr double e = 1e-9;
                if (u >= -e && u <= 1 + e && v >= -e && v <= 1 + e) return true;
                break;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<SurfacePoint> surface_intersections(const SurfaceGrid& grid, double n_atoms) {
    std::vector<SurfacePoint> out;
    const std::size_t rows = grid.rows(), cols = grid.cols();
    if (rows < 2 || cols < 2) return out;
    const double hn = grid.n_axis[1] - grid.n_axis[0];
    const double hd = grid.delta_axis[1] - grid.delta_axis[0];
    for (std::size_t r = 0; r + 1 < rows; ++r) {
        // The pulling surface changes sign across delta = -Delta; not a contour.
        const double d0 = grid.passive_delta_tau + grid.delta_axis[r];
        const double d1 = grid.passive_delta_tau + grid.delta_axis[r + 1];
        if ((d0 > 0.0) != (d1 > 0.0)) continue;
        for (std::size_t c = 0; c + 1 < cols; ++c) {
            const std::size_t k[4] = {grid.at(r, c), grid.at(r, c + 1), grid.at(r + 1, c),
                                      grid.at(r + 1, c + 1)};
            bool defined = true;
            for (std::size_t q : k) defined = defined && grid.intensity_defined[q] && grid.pulling_defined[q];
            if (!defined) continue;
            const Bilinear a{grid.intensity[k[0]] - n_atoms, grid.intensity[k[1]] - n_atoms,
                             grid.intensity[k[2]] - n_atoms, grid.intensity[k[3]] - n_atoms};
            const Bilinear b{grid.pulling[k[0]] - n_atoms, grid.pulling[k[1]] - n_atoms,
                             grid.pulling[k[2]] - n_atoms, grid.pulling[k[3]] - n_atoms};
            if (!a.straddles() || !b.straddles()) continue;
            double u, v;
            if (!solve_cell(a, b, u, v)) continue;
            u = std::clamp(u, 0.0, 1.0);
            v = std::clamp(v, 0.0, 1.0);
            SurfacePoint p{grid.n_axis[c] + u * hn, grid.delta_axis[r] + v * hd};
            const bool dup = std::any_of(out.begin(), out.end(), [&](const SurfacePoint& q) {
                return std::abs(q.n - p.n) < 1e-6 * hn && std::abs(q.delta_tau - p.delta_tau) < 1e-6 * std::abs(hd);
            });
            if (!dup) out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end(), [](const SurfacePoint& x, const SurfacePoint& y) { return x.n < y.n; });
    return out;
}

}  // namespace microlaser::semiclassical
