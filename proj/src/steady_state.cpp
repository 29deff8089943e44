#include "microlaser/steady_state.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "microlaser/errors.hpp"

namespace microlaser {

namespace {

// Kernel evaluation with optional coupling quadrature.
class KernelEval {
public:
    KernelEval(const SystemParams& params, const std::vector<CouplingNode>& nodes)
        : params_(params), nodes_(nodes) {
        for (const auto& node : nodes_) weight_sum_ += node.weight;
        if (!nodes_.empty() && !(weight_sum_ > 0.0))
            throw InvalidArgument("coupling quadrature weights must sum to a positive value");
    }

    double emission(int n, EffectiveDetuning dp) const {
        if (nodes_.empty()) return kernel::emission_probability(n, params_, dp);
        double acc = 0.0;
        for (const auto& node : nodes_) acc += node.weight * kernel::emission_probability(n, at(node), dp);
        return acc / weight_sum_;
    }

    kernel::PullingProfile profile(EffectiveDetuning dp, int n_max) const {
        if (nodes_.empty()) return kernel::make_profile(params_, dp, n_max);
        kernel::PullingProfile out;
        out.delta_prime = dp;
        out.n_max = n_max;
        out.omega_n.assign(n_max + 1, 0.0);
        out.d_n.assign(n_max + 1, 0.0);
        out.pulling_n.assign(n_max + 1, 0.0);
        for (int n = 0; n <= n_max; ++n) {
            out.omega_n[n] = kernel::rabi_frequency(n, params_, dp);
            std::complex<double> mu = 0.0;
            for (const auto& node : nodes_) mu += node.weight * kernel::mu_exact(n, at(node), dp);
            mu /= weight_sum_;
            out.d_n[n] = mu.real();
            out.pulling_n[n] = -mu.imag();
        }
        return out;
    }

private:
    SystemParams at(const CouplingNode& node) const {
        SystemParams p = params_;
        p.g_tau = node.g_tau;
        return p;
    }

    SystemParams params_;
    const std::vector<CouplingNode>& nodes_;
    double weight_sum_ = 0.0;
};

constexpr int kMinTruncation = 64;

PhotonDistribution distribution_impl(const SystemParams& params, EffectiveDetuning dp,
                                     const SteadyStateOptions& opts, const KernelEval& kern) {
    const double n_ex = params.n_ex();
    const double log_nex = n_ex > 0.0 ? std::log(n_ex) : -std::numeric_limits<double>::infinity();
    const double neg_inf = -std::numeric_limits<double>::infinity();

    std::vector<double> logp{0.0};
    double log_max = 0.0;
    double mass = 1.0;  // sum of exp(logp - log_max)
    double tail = 0.0;
    bool cap_reached = false;

    for (int n = 1;; ++n) {
        const double emit = kern.emission(n - 1, dp);
        double lp = neg_inf;
        if (logp.back() != neg_inf && emit > 0.0 && n_ex > 0.0)
            lp = logp.back() + log_nex + std::log(emit) - std::log(static_cast<double>(n));
        logp.push_back(lp);
        if (lp > log_max) {
            mass *= std::exp(log_max - lp);
            log_max = lp;
        }
        if (lp != neg_inf) mass += std::exp(lp - log_max);

        // Beyond n_ex every ratio p_{k+1}/p_k <= n_ex/(k+1) < 1, so the
        // remainder is bounded by a geometric series.
        const double q = n_ex / (n + 1.0);
        if (lp == neg_inf) {
            tail = 0.0;
        } else if (q < 1.0) {
            tail = std::exp(lp - log_max) * q / (1.0 - q) / mass;
        } else {
            tail = std::numeric_limits<double>::infinity();
        }
        const bool past_support = lp == neg_inf ? n > n_ex : q < 1.0;
        if (n >= kMinTruncation && past_support && tail < opts.tail_threshold) break;
        if (n >= opts.n_max_cap) {
            cap_reached = true;
            break;
        }
    }

    PhotonDistribution out;
    out.n_max = static_cast<int>(logp.size()) - 1;
    out.p.resize(logp.size());
    for (std::size_t n = 0; n < logp.size(); ++n)
        out.p[n] = logp[n] == neg_inf ? 0.0 : std::exp(logp[n] - log_max) / mass;
    out.tail_mass = tail;
    out.cap_reached = cap_reached;
    double mean = 0.0;
    for (std::size_t n = 0; n < out.p.size(); ++n) mean += static_cast<double>(n) * out.p[n];
    out.mean_n = mean;
    out.mandel_q = mandel_q(out.p);
    return out;
}

SteadyState evaluate_impl(const SystemParams& params, EffectiveDetuning dp,
                          const SteadyStateOptions& opts, const KernelEval& kern) {
    SteadyState s;
    s.params = params;
    s.delta_prime = dp;
    s.dist = distribution_impl(params, dp, opts, kern);
    s.profile = kern.profile(dp, s.dist.n_max);

    const auto& p = s.dist.p;
    const int n_max = s.dist.n_max;
    double total = 0.0, sum_pull = 0.0, sum_diff = 0.0;
    for (int n = 0; n < n_max; ++n) {
        const double w = (n + 1.0) * p[n + 1];
        total += w;
        sum_pull += w * s.profile.pulling_n[n];
        sum_diff += w * s.profile.d_n[n];
    }
    if (total > 0.0) {
        s.mean_pulling = sum_pull / total;
        s.mean_diffusion = sum_diff / total;
        double var = 0.0;
        for (int n = 0; n < n_max; ++n) {
            const double dev = s.profile.pulling_n[n] - s.mean_pulling;
            var += (n + 1.0) * p[n + 1] * dev * dev;
        }
        s.pulling_std = std::sqrt(var / total);
    } else {
        // No photons: the weight concentrates on the lowest component.
        s.mean_pulling = s.profile.pulling_n[0];
        s.mean_diffusion = s.profile.d_n[0];
        s.pulling_std = 0.0;
    }
    s.residual = params.delta_tau + s.mean_pulling - dp.value();

    for (int n = 0; n <= n_max; ++n) {
        if (std::abs(std::sin(0.5 * s.profile.omega_n[n])) < opts.trapping_threshold)
            s.trapping_flags.push_back(n);
    }
    if (s.dist.cap_reached) {
        std::ostringstream os;
        os << "truncation cap " << opts.n_max_cap << " reached with tail mass " << s.dist.tail_mass;
        s.warnings.push_back(os.str());
    }
    return s;
}

}  // namespace

std::vector<double> SteadyState::weights() const {
    std::vector<double> w(dist.n_max, 0.0);
    for (int n = 0; n < dist.n_max; ++n) w[n] = (n + 1.0) * dist.p[n + 1];
    return w;
}

std::optional<double> mandel_q(std::span<const double> p) {
    double mean = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
    if (!(mean > 0.0)) return std::nullopt;
    double var = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) {
        const double dev = static_cast<double>(n) - mean;
        var += dev * dev * p[n];
    }
    return var / mean - 1.0;
}

PhotonDistribution photon_distribution(const SystemParams& params, EffectiveDetuning dp,
                                       const SteadyStateOptions& opts) {
    params.validate();
    if (!std::isfinite(dp.value())) throw InvalidArgument("effective detuning must be finite");
    const KernelEval kern(params, opts.coupling_average);
    return distribution_impl(params, dp, opts, kern);
}

SteadyState evaluate_at(const SystemParams& params, EffectiveDetuning dp,
                        const SteadyStateOptions& opts) {
    params.validate();
    if (!std::isfinite(dp.value())) throw InvalidArgument("effective detuning must be finite");
    const KernelEval kern(params, opts.coupling_average);
    return evaluate_impl(params, dp, opts, kern);
}

double detuning_residual(const SystemParams& params, double delta_prime_tau,
                         const SteadyStateOptions& opts) {
    return evaluate_at(params, EffectiveDetuning(delta_prime_tau), opts).residual;
}

SteadyState self_consistent_detuning(const SystemParams& params, const SteadyStateOptions& opts) {
    params.validate();
    if (!(opts.damping > 0.0 && opts.damping <= 1.0))
        throw InvalidArgument("damping must lie in (0, 1]");
    const KernelEval kern(params, opts.coupling_average);
    const double delta = params.delta_tau;

    if (delta == 0.0) {
        SteadyState s = evaluate_impl(params, EffectiveDetuning(0.0), opts, kern);
        s.iterations = 1;
        s.converged = s.residual == 0.0;
        s.damping_used = opts.damping;
        s.method = "exact";
        return s;
    }

    double x = opts.initial_delta_prime.value_or(delta);
    double alpha = opts.damping;
    double prev_res = 0.0;
    int flips = 0;
    int evaluations = 0;
    SteadyState best;
    double best_abs = std::numeric_limits<double>::infinity();

    for (int k = 0; k < opts.max_iterations; ++k) {
        SteadyState s = evaluate_impl(params, EffectiveDetuning(x), opts, kern);
        ++evaluations;
        const double res = s.residual;
        if (std::abs(res) < best_abs) {
            best_abs = std::abs(res);
            best = s;
        }
        const double step = alpha * res;
        if (std::abs(step) < opts.tolerance) {
            SteadyState out = evaluate_impl(params, EffectiveDetuning(x + step), opts, kern);
            out.iterations = evaluations + 1;
            out.converged = true;
            out.damping_used = alpha;
            out.method = "damped";
            return out;
        }
        if (k > 0 && res * prev_res < 0.0 && std::abs(res) > 0.5 * std::abs(prev_res)) {
            if (++flips >= 2) {
                alpha *= 0.5;
                flips = 0;
                if (alpha < opts.damping_min) break;
            }
        }
        prev_res = res;
        x += step;
    }

    if (!opts.bracket_fallback) {
        best.iterations = evaluations;
        best.converged = false;
        best.damping_used = alpha;
        best.method = "damped";
        best.warnings.push_back("damped iteration did not converge");
        return best;
    }

    // r(0) = Delta and r(Delta) = <delta_n>(Delta) have opposite signs, so
    // [0, Delta] always brackets a root. Scan first to detect multiple roots.
    auto residual_at = [&](double v) {
        ++evaluations;
        return evaluate_impl(params, EffectiveDetuning(v), opts, kern).residual;
    };
    constexpr int kScan = 32;
    std::vector<double> xs(kScan + 1), rs(kScan + 1);
    for (int i = 0; i <= kScan; ++i) {
        xs[i] = delta * static_cast<double>(i) / kScan;
        rs[i] = i == 0 ? delta : residual_at(xs[i]);
    }
    std::vector<int> brackets;
    for (int i = 0; i < kScan; ++i) {
        if (rs[i] == 0.0 || rs[i] * rs[i + 1] < 0.0) brackets.push_back(i);
    }
    if (rs[kScan] == 0.0) brackets.push_back(kScan - 1);
    if (brackets.empty()) {
        best.iterations = evaluations;
        best.converged = false;
        best.damping_used = alpha;
        best.method = "bracket";
        best.warnings.push_back("no sign change of the detuning residual on [0, Delta]");
        return best;
    }
    const double anchor = best.delta_prime.value();
    int chosen = brackets.front();
    for (int b : brackets) {
        if (std::abs(0.5 * (xs[b] + xs[b + 1]) - anchor) <
            std::abs(0.5 * (xs[chosen] + xs[chosen + 1]) - anchor))
            chosen = b;
    }

    double lo = xs[chosen], hi = xs[chosen + 1];
    double root;
    bool bracket_ok = true;
    if (rs[chosen] == 0.0) {
        root = lo;
    } else if (rs[chosen + 1] == 0.0) {
        root = hi;
    } else {
        std::uintmax_t max_iter = 200;
        const double tol = opts.tolerance;
        auto [a, b] = boost::math::tools::toms748_solve(
            residual_at, lo, hi, rs[chosen], rs[chosen + 1],
            [tol](double u, double v) { return std::abs(u - v) < tol; }, max_iter);
        root = 0.5 * (a + b);
        bracket_ok = std::abs(b - a) < tol;
    }
    SteadyState out = evaluate_impl(params, EffectiveDetuning(root), opts, kern);
    out.iterations = evaluations + 1;
    out.converged = bracket_ok;
    out.damping_used = alpha;
    out.method = "bracket";
    if (brackets.size() > 1) {
        out.nonunique = true;
        std::ostringstream os;
        os << brackets.size() << " sign changes of the detuning residual on [0, Delta]";
        out.warnings.push_back(os.str());
    }
    return out;
}

FieldStatistics field_statistics(const SteadyState& state) {
    FieldStatistics f;
    f.mean_n = state.dist.mean_n;
    f.mandel_q = state.dist.mandel_q;
    f.mean_pulling = state.mean_pulling;
    f.pulling_std = state.pulling_std;
    f.mean_diffusion = state.mean_diffusion;
    return f;
}

std::vector<Lobe> find_lobes(std::span<const double> w, double prominence) {
    std::vector<Lobe> lobes;
    if (w.empty()) return lobes;
    const double wmax = *std::max_element(w.begin(), w.end());
    if (!(wmax > 0.0)) return lobes;
    const double floor = prominence * wmax;
    const int size = static_cast<int>(w.size());

    std::vector<int> peaks;
    for (int i = 0; i < size; ++i) {
        const double left = i > 0 ? w[i - 1] : -1.0;
        const double right = i + 1 < size ? w[i + 1] : -1.0;
        if (w[i] > floor && w[i] > left && w[i] >= right) peaks.push_back(i);
    }
    // Merge maxima whose separating dip is shallow (less than 10% below the
    // smaller of the two).
    std::vector<int> kept;
    for (int pk : peaks) {
        if (kept.empty()) {
            kept.push_back(pk);
            continue;
        }
        const int prev = kept.back();
        const double dip = *std::min_element(w.begin() + prev, w.begin() + pk + 1);
        if (dip > 0.9 * std::min(w[prev], w[pk])) {
            if (w[pk] > w[prev]) kept.back() = pk;
        } else {
            kept.push_back(pk);
        }
    }
    int begin = 0;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        int end = size;
        if (k + 1 < kept.size()) {
            auto it = std::min_element(w.begin() + kept[k], w.begin() + kept[k + 1] + 1);
            end = static_cast<int>(it - w.begin());
        }
        Lobe lobe;
        lobe.peak = kept[k];
        lobe.begin = begin;
        lobe.end = end;
        for (int i = begin; i < end; ++i) lobe.mass += w[i];
        lobes.push_back(lobe);
        begin = end;
    }
    return lobes;
}

}  // namespace microlaser
