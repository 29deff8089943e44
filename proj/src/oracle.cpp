#include "microlaser/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "microlaser/errors.hpp"
#include "microlaser/kernel.hpp"

namespace microlaser::oracle {

template <class T>
void Tridiagonal<T>::apply(std::span<const T> x, std::span<T> y) const {
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
        T acc = diag[i] * x[i];
        if (i > 0) acc += lower[i] * x[i - 1];
        if (i + 1 < m) acc += upper[i] * x[i + 1];
        y[i] = acc;
    }
}

template <class T>
double Tridiagonal<T>::max_abs_row_sum() const {
    double best = 0.0;
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
        double s = std::abs(diag[i]);
        if (i > 0) s += std::abs(lower[i]);
        if (i + 1 < m) s += std::abs(upper[i]);
        best = std::max(best, s);
    }
    return best;
}

template struct Tridiagonal<double>;
template struct Tridiagonal<std::complex<double>>;

RealTridiagonal diagonal_generator(const SystemParams& params, EffectiveDetuning dp, int size) {
    if (size < 1) throw InvalidArgument("generator size must be >= 1");
    const double ra = params.injection_tau();
    const double gc = params.gamma_c_tau;
    RealTridiagonal a;
    a.lower.assign(size, 0.0);
    a.diag.assign(size, 0.0);
    a.upper.assign(size, 0.0);
    for (int n = 0; n < size; ++n) {
        const double gain_out = n + 1 < size ? ra * kernel::emission_probability(n, params, dp) : 0.0;
        a.diag[n] = -gain_out - 2.0 * gc * n;
        if (n + 1 < size) a.upper[n] = 2.0 * gc * (n + 1.0);
        if (n > 0) a.lower[n] = ra * kernel::emission_probability(n - 1, params, dp);
    }
    return a;
}

ComplexTridiagonal offdiagonal_generator(const SystemParams& params, EffectiveDetuning dp, int size) {
    if (size < 1) throw InvalidArgument("generator size must be >= 1");
    const double ra = params.injection_tau();
    const double gc = params.gamma_c_tau;
    const double g2 = params.g_tau * params.g_tau;
    std::vector<double> om(size + 1), s(size + 1);
    for (int k = 0; k <= size; ++k) {
        om[k] = kernel::rabi_frequency(k, params, dp);
        s[k] = std::sin(0.5 * om[k]);
    }
    ComplexTridiagonal a;
    a.lower.assign(size, 0.0);
    a.diag.assign(size, 0.0);
    a.upper.assign(size, 0.0);
    for (int n = 0; n < size; ++n) {
        const double nn = n;
        // -mu_n/2 carries the detailed-balance rearrangement; undo it so the
        // gain and loss couplings appear explicitly.
        const double gain_diag = ra * 4.0 * g2 * std::sqrt((nn + 1.0) * (nn + 2.0)) / (om[n] * om[n + 1]) *
                                 s[n] * s[n + 1];
        a.diag[n] = -kernel::mu_exact(n, params, dp) - 2.0 * gc * std::sqrt(nn * (nn + 1.0)) - gain_diag;
        if (n > 0)
            a.lower[n] = ra * 4.0 * g2 * std::sqrt(nn * (nn + 1.0)) / (om[n - 1] * om[n]) * s[n - 1] * s[n];
        if (n + 1 < size) a.upper[n] = 2.0 * gc * std::sqrt((nn + 1.0) * (nn + 2.0));
    }
    return a;
}

namespace {

template <class T>
double weighted_rms(const std::vector<T>& err, const std::vector<T>& y0, const std::vector<T>& y1,
                    double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(err.size()));
}

template <class T>
double l2_diff(const std::vector<T>& u, const std::vector<T>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += std::norm(u[i] - v[i]);
    return std::sqrt(acc);
}

// Solves (I - c A) x = r by the Thomas algorithm.
template <class T>
class ShiftedSolver {
  public:
    ShiftedSolver(const Tridiagonal<T>& a, double c) : a_(a), c_(c), cp_(a.size()), den_(a.size()) {
        const std::size_t m = a.size();
        for (std::size_t i = 0; i < m; ++i) {
            const T d = T(1.0) - c * a.diag[i];
            const T l = i > 0 ? T(-c) * a.lower[i] : T(0.0);
            den_[i] = i > 0 ? d - l * cp_[i - 1] : d;
            cp_[i] = i + 1 < m ? T(-c) * a.upper[i] / den_[i] : T(0.0);
        }
    }

    void solve(const std::vector<T>& r, std::vector<T>& x) const {
        const std::size_t m = r.size();
        x.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
            const T l = i > 0 ? T(-c_) * a_.lower[i] : T(0.0);
            x[i] = (r[i] - (i > 0 ? l * x[i - 1] : T(0.0))) / den_[i];
        }
        for (std::size_t i = m - 1; i-- > 0;) x[i] -= cp_[i] * x[i + 1];
    }

  private:
    const Tridiagonal<T>& a_;
    double c_;
    std::vector<T> cp_, den_;
};

// Alexander's L-stable, stiffly accurate 3-stage SDIRK.
constexpr double kGamma = 0.43586652150845899942;
constexpr double kA21 = 0.5 * (1.0 - kGamma);
constexpr double kB1 = -1.5 * kGamma * kGamma + 4.0 * kGamma - 0.25;
constexpr double kB2 = 1.5 * kGamma * kGamma - 5.0 * kGamma + 1.25;

template <class T>
void sdirk_step(const Tridiagonal<T>& a, const std::vector<T>& y, double h, std::vector<T>& out) {
    const std::size_t m = y.size();
    ShiftedSolver<T> solver(a, h * kGamma);
    std::vector<T> y1, y2, k1(m), k2(m), rhs(m);
    solver.solve(y, y1);
    a.apply(y1, k1);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = y[i] + h * kA21 * k1[i];
    solver.solve(rhs, y2);
    a.apply(y2, k2);
    for (std::size_t i = 0; i < m; ++i) rhs[i] = y[i] + h * (kB1 * k1[i] + kB2 * k2[i]);
    solver.solve(rhs, out);
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

template <class T>
IntegratorStats integrate(const Tridiagonal<T>& a, std::vector<T>& y, double t0,
                          std::span<const double> t_out,
                          const std::function<bool(std::size_t, double, const std::vector<T>&)>& observe,
                          const IntegratorOptions& opts) {
    IntegratorStats stats;
    const std::size_t m = y.size();
    if (m != a.size()) throw InvalidArgument("state and generator sizes differ");
    double ymax = 0.0;
    for (const auto& v : y) ymax = std::max(ymax, std::abs(v));
    const double atol = opts.atol > 0.0 ? opts.atol : std::max(1e-14 * ymax, 1e-300);
    const double rtol = opts.rtol;
    const double scale = std::max(a.max_abs_row_sum(), 1e-300);

    bool implicit = opts.force_implicit;
    stats.implicit = implicit;
    double t = t0;
    double h = 0.01 / scale;
    int stiff_count = 0, nonstiff_count = 0;

    std::vector<T> k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), tmp(m), y6(m), ynew(m), err(m);
    std::vector<T> big, half1, half2;
    a.apply(y, k1);

    for (std::size_t idx = 0; idx < t_out.size(); ++idx) {
        const double target = t_out[idx];
        if (target < t) throw InvalidArgument("output times must be increasing and >= t0");
        while (t < target) {
            if (stats.steps + stats.rejected >= opts.max_steps) {
                std::ostringstream os;
                os << "integrator exceeded " << opts.max_steps << " steps at t=" << t;
                throw ConvergenceError(os.str(), t);
            }
            const bool last = t + h >= target;
            const double hs = last ? target - t : h;
            if (hs < 1e-14 * std::max(1.0, std::abs(t)) && !last) {
                std::ostringstream os;
                os << "step-size collapse at t=" << t;
                throw ConvergenceError(os.str(), t);
            }

            double errn;
            if (!implicit) {
                for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
                a.apply(tmp, k2);
                for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
                a.apply(tmp, k3);
                for (std::size_t i = 0; i < m; ++i)
                    tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
                a.apply(tmp, k4);
                for (std::size_t i = 0; i < m; ++i)
                    tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
                a.apply(tmp, k5);
                for (std::size_t i = 0; i < m; ++i)
                    y6[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
                a.apply(y6, k6);
                for (std::size_t i = 0; i < m; ++i)
                    ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
                a.apply(ynew, k7);
                for (std::size_t i = 0; i < m; ++i)
                    err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                errn = weighted_rms(err, y, ynew, atol, rtol);
                if (errn <= 1.0) {
                    // Hairer's stiffness estimate from the last two stages.
                    const double den = l2_diff(ynew, y6);
                    const double rho = den > 0.0 ? l2_diff(k7, k6) / den : 0.0;
                    if (hs * rho > 3.25) {
                        nonstiff_count = 0;
                        if (++stiff_count >= opts.stiff_trigger) {
                            implicit = true;
                            stats.implicit = true;
                            stats.switch_time = t + hs;
                        }
                    } else if (++nonstiff_count >= 6) {
                        stiff_count = 0;
                    }
                    y.swap(ynew);
                    k1.swap(k7);
                    t = last ? target : t + hs;
                    ++stats.steps;
                } else {
                    ++stats.rejected;
                }
                const double fac = errn == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(errn, -0.2), 0.2, 10.0);
                if (!last || errn > 1.0) h = hs * fac;
                else h = std::max(h, hs * fac);
            } else {
                sdirk_step(a, y, hs, big);
                sdirk_step(a, y, 0.5 * hs, half1);
                sdirk_step(a, half1, 0.5 * hs, half2);
                for (std::size_t i = 0; i < m; ++i) err[i] = (half2[i] - big[i]) / 7.0;
                errn = weighted_rms(err, y, half2, atol, rtol);
                if (errn <= 1.0) {
                    y.swap(half2);
                    t = last ? target : t + hs;
                    ++stats.steps;
                } else {
                    ++stats.rejected;
                }
                const double fac = errn == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(errn, -0.25), 0.2, 5.0);
                if (!last || errn > 1.0) h = hs * fac;
                else h = std::max(h, hs * fac);
                if (errn <= 1.0) a.apply(y, k1);
            }
        }
        if (!observe(idx, t, y)) break;
    }
    return stats;
}

template IntegratorStats integrate<double>(
    const Tridiagonal<double>&, std::vector<double>&, double, std::span<const double>,
    const std::function<bool(std::size_t, double, const std::vector<double>&)>&, const IntegratorOptions&);
template IntegratorStats integrate<std::complex<double>>(
    const Tridiagonal<std::complex<double>>&, std::vector<std::complex<double>>&, double,
    std::span<const double>,
    const std::function<bool(std::size_t, double, const std::vector<std::complex<double>>&)>&,
    const IntegratorOptions&);

DiagonalResult evolve_diagonal(const SystemParams& params, EffectiveDetuning dp, double t_end,
                               int size, const IntegratorOptions& opts) {
    params.validate();
    if (!(t_end > 0.0)) throw InvalidArgument("t_end must be > 0");
    if (size <= 0) {
        const int n_max = photon_distribution(params, dp).n_max;
        size = n_max + 1 + std::max(16, n_max / 8);
    }
    const auto gen = diagonal_generator(params, dp, size);
    std::vector<double> p(size, 0.0);
    p[0] = 1.0;

    const double gc = params.gamma_c_tau;
    const double check_every = 0.5 / gc;
    std::vector<double> checkpoints;
    for (double t = check_every; t < t_end; t += std::max(check_every, 0.02 * t)) checkpoints.push_back(t);
    checkpoints.push_back(t_end);

    DiagonalResult out;
    std::vector<double> deriv(size);
    auto observe = [&](std::size_t, double t, const std::vector<double>& y) {
        gen.apply(y, deriv);
        double norm1 = 0.0;
        for (double v : deriv) norm1 += std::abs(v);
        const double trace = std::accumulate(y.begin(), y.end(), 0.0);
        out.max_trace_error = std::max(out.max_trace_error, std::abs(trace - 1.0));
        out.t_reached = t;
        out.derivative_norm = norm1;
        out.stationary = norm1 < 1e-12 * gc;
        return !out.stationary;
    };
    out.stats = integrate<double>(gen, p, 0.0, checkpoints, observe, opts);

    out.dist.p = p;
    out.dist.n_max = size - 1;
    double mean = 0.0;
    for (int n = 0; n < size; ++n) mean += n * p[n];
    out.dist.mean_n = mean;
    out.dist.mandel_q = mandel_q(p);
    out.dist.tail_mass = p.back();
    return out;
}

OffDiagonalState initial_offdiagonal(const PhotonDistribution& dist) {
    OffDiagonalState s;
    s.rho1.resize(dist.n_max);
    for (int n = 0; n < dist.n_max; ++n) s.rho1[n] = std::sqrt(n + 1.0) * dist.p[n + 1];
    return s;
}

CorrelationSamples evolve_offdiagonal(const OffDiagonalState& state0, const SystemParams& params,
                                      EffectiveDetuning dp, std::span<const double> t_grid,
                                      const IntegratorOptions& opts) {
    params.validate();
    const int size = static_cast<int>(state0.rho1.size());
    if (size < 1) throw InvalidArgument("off-diagonal state is empty");
    const auto gen = offdiagonal_generator(params, dp, size);
    std::vector<double> root(size);
    for (int n = 0; n < size; ++n) root[n] = std::sqrt(n + 1.0);

    CorrelationSamples out;
    out.t.reserve(t_grid.size());
    out.g1.reserve(t_grid.size());
    auto y = state0.rho1;
    auto observe = [&](std::size_t, double t, const std::vector<std::complex<double>>& v) {
        std::complex<double> acc = 0.0;
        for (int n = 0; n < size; ++n) acc += root[n] * v[n];
        out.t.push_back(t);
        out.g1.push_back(acc);
        return true;
    };
    out.stats = integrate<std::complex<double>>(gen, y, state0.t, t_grid, observe, opts);
    return out;
}

void write_correlation_csv(std::ostream& os, const CorrelationSamples& samples) {
    const auto old = os.precision(17);
    os << "t_tau,re_g1,im_g1\r\n";
    for (std::size_t i = 0; i < samples.t.size(); ++i)
        os << samples.t[i] << ',' << samples.g1[i].real() << ',' << samples.g1[i].imag() << "\r\n";
    os.precision(old);
}

TailFit fit_tail(const CorrelationSamples& samples) {
    const std::size_t k = samples.t.size();
    if (k < 20) throw InvalidArgument("need at least 20 correlation samples");
    TailFit fit;
    fit.first_sample = k - k / 10 - 1;
    const double dt = samples.t[1] - samples.t[0];
    std::complex<double> acc = 0.0;
    for (std::size_t i = fit.first_sample; i + 1 < k; ++i) acc += std::log(samples.g1[i + 1] / samples.g1[i]);
    fit.rate = acc / (dt * static_cast<double>(k - 1 - fit.first_sample));
    return fit;
}

namespace {

// int_0^1 (1-u) e^{-i th u} du and int_0^1 u e^{-i th u} du.
std::pair<std::complex<double>, std::complex<double>> filon_weights(double th) {
    using C = std::complex<double>;
    const C mi(0.0, -1.0);
    C i0, i1;
    if (std::abs(th) < 0.05) {
        // sum_k (-i th)^k / (k+1)! and sum_k (-i th)^k / (k! (k+2))
        C pw = 1.0;
        double fact = 1.0;
        for (int k = 0; k < 10; ++k) {
            if (k > 0) {
                pw *= mi * th;
                fact *= k;
            }
            i0 += pw / (fact * (k + 1));
            i1 += pw / (fact * (k + 2));
        }
    } else {
        const C e = std::exp(mi * th);
        i0 = (1.0 - e) / (C(0.0, 1.0) * th);
        i1 = C(0.0, 1.0) * e / th - (1.0 - e) / (th * th);
    }
    return {i0 - i1, i1};
}

}  // namespace

OracleSpectrum oracle_spectrum(const CorrelationSamples& samples, const GridSpec& grid,
                               double gamma_c_tau) {
    grid.validate();
    const std::size_t k = samples.t.size();
    if (k < 20 || samples.t.front() != 0.0)
        throw InvalidArgument("oracle spectrum needs >= 20 uniform samples starting at t = 0");
    const double dt = samples.t[1] - samples.t[0];
    for (std::size_t i = 1; i < k; ++i)
        if (std::abs(samples.t[i] - samples.t[i - 1] - dt) > 1e-9 * dt)
            throw InvalidArgument("oracle spectrum needs uniformly spaced samples");
    const double mean_n = samples.g1.front().real();
    if (std::abs(samples.g1.back()) > 1e-3 * mean_n) {
        std::ostringstream os;
        os << "correlation has not decayed: |g1(t_end)| = " << std::abs(samples.g1.back())
           << " > 1e-3 <n>; evolve longer";
        throw Error(os.str());
    }

    OracleSpectrum out;
    out.tail = fit_tail(samples);
    if (!(out.tail.rate.real() < 0.0))
        out.spectrum.warnings.push_back("tail fit is not decaying; tail extrapolation skipped");

    auto& spec = out.spectrum;
    spec.grid = grid.values();
    spec.raw_density.resize(spec.grid.size());
    const double t_end = samples.t.back();
    for (std::size_t j = 0; j < spec.grid.size(); ++j) {
        const double nu = spec.grid[j] * gamma_c_tau;
        const auto [wa, wb] = filon_weights(nu * dt);
        const std::complex<double> step = std::polar(1.0, -nu * dt);
        std::complex<double> phase = 1.0, acc = 0.0;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            acc += phase * (wa * samples.g1[i] + wb * samples.g1[i + 1]);
            phase *= step;
        }
        acc *= dt;
        if (out.tail.rate.real() < 0.0)
            acc += samples.g1.back() * std::polar(1.0, -nu * t_end) /
                   (std::complex<double>(0.0, nu) - out.tail.rate);
        spec.raw_density[j] = gamma_c_tau * acc.real();
    }
    spec.density = spec.raw_density;
    normalize_peak(spec.density);
    spec.peaks = peak_analysis(spec.grid, spec.density);
    return out;
}

ModeComparison compare_dominant_mode(const SteadyState& state, const TailFit& tail) {
    ModeComparison out;
    const auto w = state.weights();
    if (w.empty()) throw Error("steady state has no weights");
    out.n_peak = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
    const double gc = state.params.gamma_c_tau;
    out.decay_fit = -tail.rate.real() / gc;
    out.rotation_fit = tail.rate.imag() / gc;
    out.decay_exact = state.profile.d_n[out.n_peak] / gc;
    out.rotation_exact = state.profile.pulling_n[out.n_peak] / gc;
    out.decay_rel_error = std::abs(out.decay_fit - out.decay_exact) / std::abs(out.decay_exact);
    out.rotation_rel_error = out.rotation_exact != 0.0
                                 ? std::abs(out.rotation_fit - out.rotation_exact) / std::abs(out.rotation_exact)
                                 : std::abs(out.rotation_fit);
    out.phase_rotation_residual = out.rotation_fit - state.mean_pulling / gc;
    return out;
}

ValidationReport validate_state(const SteadyState& state, const ValidationOptions& opts) {
    ValidationReport rep;
    const auto& params = state.params;
    const double gc = params.gamma_c_tau;
    if (!state.trapping_flags.empty())
        rep.warnings.push_back("trapping indices present; the single-decay ansatz is not expected to hold");

    // Diagonal sector from vacuum.
    rep.diagonal = evolve_diagonal(params, state.delta_prime, 1e7 / std::max(gc, 1e-300), 0, opts.integrator);
    if (!rep.diagonal.stationary) {
        std::ostringstream os;
        os << "diagonal evolution not stationary: ||dp/dt||_1 = " << rep.diagonal.derivative_norm;
        rep.warnings.push_back(os.str());
    }
    const auto& pa = rep.diagonal.dist.p;
    const auto& pb = state.dist.p;
    double tv = 0.0;
    for (std::size_t n = 0; n < std::max(pa.size(), pb.size()); ++n) {
        const double x = n < pa.size() ? pa[n] : 0.0;
        const double y = n < pb.size() ? pb[n] : 0.0;
        tv += std::abs(x - y);
    }
    rep.tv_distance = 0.5 * tv;

    // Off-diagonal sector.
    rep.analytic = build_spectrum(state, opts.grid);
    const GridSpec grid = opts.grid.value_or(default_grid(state));
    const auto w = state.weights();
    const double wmax = *std::max_element(w.begin(), w.end());
    double omega_max = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n)
        if (w[n] >= 1e-12 * wmax)
            omega_max = std::max(omega_max, std::abs(state.profile.pulling_n[n]) + state.profile.d_n[n]);
    omega_max = std::max(omega_max, std::max(std::abs(grid.min), std::abs(grid.max)) * gc);

    const auto init = initial_offdiagonal(state.dist);
    double t_end = opts.decay_times / state.mean_diffusion;
    rep.correlation_window = 3.0 / state.mean_diffusion;
    for (int attempt = 0;; ++attempt) {
        const double dt = std::min(t_end / opts.min_samples, opts.phase_step / omega_max);
        const auto count = static_cast<std::size_t>(std::ceil(t_end / dt)) + 1;
        std::vector<double> tg(count);
        for (std::size_t i = 0; i < count; ++i) tg[i] = dt * static_cast<double>(i);
        rep.correlation = evolve_offdiagonal(init, params, state.delta_prime, tg, opts.integrator);
        const double mean_n = rep.correlation.g1.front().real();
        if (std::abs(rep.correlation.g1.back()) <= 1e-3 * mean_n || attempt == 3) break;
        t_end *= 2.0;
    }

    const double mean_n = rep.correlation.g1.front().real();
    for (std::size_t i = 0; i < rep.correlation.t.size(); ++i) {
        const double t = rep.correlation.t[i];
        if (t > rep.correlation_window) break;
        const auto ref = correlation_g1(state, t);
        rep.correlation_max_error = std::max(rep.correlation_max_error, std::abs(rep.correlation.g1[i] - ref) / mean_n);
    }

    rep.oracle = oracle_spectrum(rep.correlation, grid, gc);
    std::vector<double> diff(rep.analytic.grid.size());
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = std::abs(rep.analytic.raw_density[i] - rep.oracle.spectrum.raw_density[i]);
    rep.spectral_l1 = trapezoid(rep.analytic.grid, diff) / trapezoid(rep.analytic.grid, rep.analytic.raw_density);
    rep.mode = compare_dominant_mode(state, rep.oracle.tail);
    return rep;
}

}  // namespace microlaser::oracle
