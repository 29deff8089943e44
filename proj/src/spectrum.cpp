#include "microlaser/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/NonLinearOptimization>

#include "microlaser/errors.hpp"

namespace microlaser {

void GridSpec::validate() const {
    if (!(std::isfinite(min) && std::isfinite(max) && max > min))
        throw InvalidArgument("spectrum grid needs finite min < max");
    if (points < 2) throw InvalidArgument("spectrum grid needs at least 2 points");
}

std::vector<double> GridSpec::values() const {
    std::vector<double> out(points);
    const double h = spacing();
    for (int i = 0; i < points; ++i) out[i] = min + h * i;
    out.back() = max;
    return out;
}

std::complex<double> correlation_g1(const SteadyState& state, double t_tau) {
    if (!(t_tau >= 0.0)) throw InvalidArgument("correlation time must be >= 0");
    const auto& p = state.dist.p;
    std::complex<double> acc = 0.0;
    for (int n = 0; n < state.dist.n_max; ++n) {
        const double w = (n + 1.0) * p[n + 1];
        if (w == 0.0) continue;
        if (t_tau == 0.0) {
            acc += w;
            continue;
        }
        const std::complex<double> rate(-state.profile.d_n[n], state.profile.pulling_n[n]);
        acc += w * std::exp(rate * t_tau);
    }
    return acc;
}

GridSpec default_grid(const SteadyState& state) {
    const double gc = state.params.gamma_c_tau;
    const double center = state.mean_pulling / gc;
    double half = std::max(10.0 * state.mean_diffusion, 6.0 * state.pulling_std) / gc;
    if (!(half > 0.0)) half = 10.0;
    return GridSpec{center - half, center + half, 4096};
}

void normalize_peak(std::vector<double>& density) {
    if (density.empty()) return;
    const double m = *std::max_element(density.begin(), density.end());
    if (m > 0.0)
        for (double& v : density) v /= m;
}

Spectrum build_spectrum(const SteadyState& state, std::optional<GridSpec> grid_spec) {
    const GridSpec spec = grid_spec.value_or(default_grid(state));
    spec.validate();
    const double gc = state.params.gamma_c_tau;
    const auto w = state.weights();
    if (w.empty()) throw Error("steady state has no photon-number support");
    const double wmax = *std::max_element(w.begin(), w.end());
    if (!(wmax > 0.0)) throw Error("steady state carries no first-order coherence (<n> = 0)");
    const double cut = 1e-12 * wmax;

    for (int n : state.trapping_flags) {
        if (n < static_cast<int>(w.size()) && w[n] > cut)
            throw Error("trapping state: the single-decay spectrum is invalid here; "
                        "use the oracle spectrum instead");
    }

    struct Component {
        double weight, width, center;
    };
    std::vector<Component> comps;
    for (std::size_t n = 0; n < w.size(); ++n) {
        if (w[n] < cut) continue;
        const double width = state.profile.d_n[n] / gc;
        if (!(width > 0.0)) {
            std::ostringstream os;
            os << "non-positive phase diffusion D_n at n=" << n << "; use the oracle spectrum";
            throw Error(os.str());
        }
        const double center = state.profile.pulling_n[n] / gc;
        comps.push_back({w[n], width, center});
    }

    Spectrum out;
    out.components_kept = static_cast<int>(comps.size());
    out.grid = spec.values();
    out.raw_density.assign(out.grid.size(), 0.0);
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double x = out.grid[i];
        double acc = 0.0;
        for (const auto& c : comps) {
            const double u = x - c.center;
            acc += c.weight * c.width / (c.width * c.width + u * u);
        }
        out.raw_density[i] = acc;
    }
    double total = 0.0, inside = 0.0;
    for (const auto& c : comps) {
        total += c.weight * std::numbers::pi;
        inside += c.weight * (std::atan((spec.max - c.center) / c.width) - std::atan((spec.min - c.center) / c.width));
    }
    if (total > 0.0 && 1.0 - inside / total > 1e-3) {
        std::ostringstream os;
        os << "grid misses " << 1.0 - inside / total << " of the spectral mass";
        out.warnings.push_back(os.str());
    }

    out.density = out.raw_density;
    normalize_peak(out.density);
    out.peaks = peak_analysis(out.grid, out.density);
    return out;
}

std::vector<Peak> peak_analysis(std::span<const double> grid, std::span<const double> density,
                                double prominence) {
    std::vector<Peak> peaks;
    const int size = static_cast<int>(density.size());
    if (size < 3 || grid.size() != density.size()) return peaks;
    const double gmax = *std::max_element(density.begin(), density.end());
    if (!(gmax > 0.0)) return peaks;

    std::vector<int> maxima;
    for (int i = 0; i < size; ++i) {
        const double left = i > 0 ? density[i - 1] : -1.0;
        const double right = i + 1 < size ? density[i + 1] : -1.0;
        if (density[i] > left && density[i] >= right && density[i] >= prominence * gmax)
            maxima.push_back(i);
    }
    // A maximum must rise above the deeper of its two separating minima by
    // the prominence; otherwise it merges into its taller neighbour.
    bool merged = true;
    while (merged && maxima.size() > 1) {
        merged = false;
        for (std::size_t k = 0; k + 1 < maxima.size(); ++k) {
            const int a = maxima[k], b = maxima[k + 1];
            const double dip = *std::min_element(density.begin() + a, density.begin() + b + 1);
            if (std::min(density[a], density[b]) - dip < prominence * gmax) {
                maxima.erase(maxima.begin() + static_cast<long>(density[a] >= density[b] ? k + 1 : k));
                merged = true;
                break;
            }
        }
    }

    std::vector<int> bounds{0};
    for (std::size_t k = 0; k + 1 < maxima.size(); ++k) {
        auto it = std::min_element(density.begin() + maxima[k], density.begin() + maxima[k + 1] + 1);
        bounds.push_back(static_cast<int>(it - density.begin()));
    }
    bounds.push_back(size - 1);

    const double total = trapezoid(grid, density);
    for (std::size_t k = 0; k < maxima.size(); ++k) {
        const int i = maxima[k];
        Peak pk;
        pk.index = i;
        pk.center = grid[i];
        pk.height = density[i];
        const double half = 0.5 * density[i];
        // Half-maximum crossings, linearly interpolated; fall back to the
        // lobe boundary when the lobe never drops to half height.
        double left = grid[bounds[k]];
        for (int j = i; j > bounds[k]; --j) {
            if (density[j - 1] <= half) {
                const double f = (half - density[j - 1]) / (density[j] - density[j - 1]);
                left = grid[j - 1] + f * (grid[j] - grid[j - 1]);
                break;
            }
        }
        double right = grid[bounds[k + 1]];
        for (int j = i; j < bounds[k + 1]; ++j) {
            if (density[j + 1] <= half) {
                const double f = (density[j] - half) / (density[j] - density[j + 1]);
                right = grid[j] + f * (grid[j + 1] - grid[j]);
                break;
            }
        }
        pk.hwhm = 0.5 * (right - left);
        const int a = bounds[k], b = bounds[k + 1];
        const double area = trapezoid(grid.subspan(a, b - a + 1), density.subspan(a, b - a + 1));
        pk.area_share = total > 0.0 ? area / total : 0.0;
        peaks.push_back(pk);
    }
    return peaks;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return acc;
}

double first_moment(std::span<const double> x, std::span<const double> y) {
    std::vector<double> xy(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] * y[i];
    return trapezoid(x, xy) / trapezoid(x, y);
}

double second_moment(std::span<const double> x, std::span<const double> y) {
    const double mean = first_moment(x, y);
    std::vector<double> m2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) m2[i] = (x[i] - mean) * (x[i] - mean) * y[i];
    return trapezoid(x, m2) / trapezoid(x, y);
}

namespace {

struct LorentzianFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    std::span<const double> x, y;

    int inputs() const { return 3; }
    int values() const { return static_cast<int>(x.size()); }

    // params: center, log(hwhm), height
    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
        const double w = std::exp(p[1]);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = x[i] - p[0];
            f[static_cast<Eigen::Index>(i)] = p[2] * w * w / (w * w + u * u) - y[i];
        }
        return 0;
    }

    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
        const double w = std::exp(p[1]);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = x[i] - p[0];
            const double den = w * w + u * u;
            const double l = w * w / den;
            const auto r = static_cast<Eigen::Index>(i);
            jac(r, 0) = p[2] * l * 2.0 * u / den;
            jac(r, 1) = p[2] * 2.0 * l * u * u / den;
            jac(r, 2) = l;
        }
        return 0;
    }
};

}  // namespace

LorentzianFit fit_lorentzian(std::span<const double> grid, std::span<const double> density) {
    if (grid.size() != density.size() || grid.size() < 4)
        throw InvalidArgument("Lorentzian fit needs matching grid and density with >= 4 points");
    const auto peaks = peak_analysis(grid, density, 0.0);
    auto top = std::max_element(density.begin(), density.end());
    const auto itop = static_cast<std::size_t>(top - density.begin());
    double hw = 0.0;
    for (const auto& pk : peaks)
        if (static_cast<std::size_t>(pk.index) == itop) hw = pk.hwhm;
    if (!(hw > 0.0)) hw = 0.05 * (grid.back() - grid.front());

    LorentzianFunctor functor{{}, {}};
    functor.x = grid;
    functor.y = density;
    Eigen::VectorXd p(3);
    p << grid[itop], std::log(hw), *top;
    Eigen::LevenbergMarquardt<LorentzianFunctor> lm(functor);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 2000;
    const auto status = lm.minimize(p);

    LorentzianFit fit;
    fit.center = p[0];
    fit.hwhm = std::exp(p[1]);
    fit.height = p[2];
    fit.ok = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;
    double ss = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = fit(grid[i]) - density[i];
        ss += r * r;
        mx = std::max(mx, std::abs(r));
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(grid.size()));
    fit.max_residual = mx;
    return fit;
}

double core_second_moment_ratio(std::span<const double> grid, std::span<const double> density,
                                const LorentzianFit& fit) {
    std::vector<double> x, y, l;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid[i] - fit.center) > fit.hwhm) continue;
        x.push_back(grid[i]);
        y.push_back(density[i]);
        l.push_back(fit(grid[i]));
    }
    if (x.size() < 3) throw InvalidArgument("Lorentzian core spans fewer than 3 grid points");
    auto moment = [&](const std::vector<double>& f) {
        std::vector<double> m2(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) m2[i] = (x[i] - fit.center) * (x[i] - fit.center) * f[i];
        return trapezoid(x, m2) / trapezoid(x, f);
    };
    return moment(y) / moment(l);
}

}  // namespace microlaser
