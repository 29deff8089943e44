#include "microlaser/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "microlaser/errors.hpp"

namespace microlaser {

Comparison compare(const SteadyState& quantum, const semiclassical::BranchSet& branches) {
    Comparison c;
    const double gc = quantum.params.gamma_c_tau;
    c.quantum_n = quantum.dist.mean_n;
    c.quantum_pulling = quantum.mean_pulling / gc;

    const semiclassical::Branch* pick = nullptr;
    for (const auto& b : branches.branches) {
        if (b.n <= 0.0 || !b.stable) continue;
        if (!pick || std::abs(b.n - c.quantum_n) < std::abs(pick->n - c.quantum_n)) pick = &b;
    }
    if (!pick && !branches.branches.empty()) pick = &branches.branches.front();
    if (pick) {
        c.semiclassical_n = pick->n;
        c.semiclassical_pulling = pick->delta_tau / gc;
        c.branch_index = pick->branch_index;
    }
    c.n_rel_deviation = c.quantum_n > 0.0 ? std::abs(c.quantum_n - c.semiclassical_n) / c.quantum_n
                                          : (c.semiclassical_n > 0.0 ? 1.0 : 0.0);
    c.pulling_deviation = std::abs(c.quantum_pulling - c.semiclassical_pulling);
    c.exceeds = c.n_rel_deviation >= Comparison::kNThreshold ||
                c.pulling_deviation >= Comparison::kPullingThreshold;
    return c;
}

bool PointResult::ok() const {
    if (!errors.empty()) return false;
    if (state && !state->converged) return false;
    return true;
}

PointResult run_point_at(const RunConfig& cfg, const SystemParams& params,
                         std::optional<double> warm_delta_prime_tau) {
    PointResult r;
    r.mode = cfg.mode;
    r.params = params;
    const bool need_quantum = cfg.mode != Mode::semiclassical;
    const bool need_branches = cfg.mode == Mode::semiclassical || cfg.mode == Mode::compare;

    if (need_quantum) {
        try {
            auto opts = cfg.solver;
            if (warm_delta_prime_tau) opts.initial_delta_prime = warm_delta_prime_tau;
            r.state = self_consistent_detuning(params, opts);
            if (!r.state->converged) r.errors.push_back("self-consistent detuning did not converge");
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("quantum solve: ") + e.what());
        }
    }
    if (r.state && cfg.mode == Mode::quantum && cfg.emit_spectrum) {
        try {
            r.spectrum = build_spectrum(*r.state, cfg.spectrum_grid);
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("spectrum: ") + e.what());
        }
    }
    if (need_branches) {
        try {
            r.branches = semiclassical::solve_branches(params, cfg.branches);
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("semiclassical solve: ") + e.what());
        }
    }
    if (cfg.mode == Mode::compare && r.state && r.branches) r.comparison = compare(*r.state, *r.branches);
    if (cfg.mode == Mode::oracle && r.state) {
        try {
            oracle::ValidationOptions vo;
            vo.grid = cfg.spectrum_grid;
            r.validation = oracle::validate_state(*r.state, vo);
            r.spectrum = r.validation->analytic;
        } catch (const std::exception& e) {
            r.errors.push_back(std::string("oracle: ") + e.what());
        }
    }
    return r;
}

PointResult run_point(const RunConfig& cfg) {
    if (cfg.sweep) throw InvalidArgument("run_point called with a sweep config; use run_sweep");
    return run_point_at(cfg, cfg.params, std::nullopt);
}

bool SweepTable::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.result.ok(); });
}

int worker_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* env = std::getenv("MICROLASER_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

SweepTable run_sweep(const RunConfig& cfg) {
    if (!cfg.sweep) throw InvalidArgument("run_sweep needs a [sweep] section");
    const auto& spec = *cfg.sweep;
    spec.validate();
    SweepTable table;
    table.spec = spec;
    table.mode = cfg.mode;
    const auto values = spec.values();
    table.rows.resize(values.size());

    // Branch tracking needs the previous point, so warm starts run in order.
    const bool warm = !cfg.cold_start && cfg.mode != Mode::semiclassical;
    table.warm_started = warm;
    if (warm) {
        table.threads = 1;
        std::optional<double> prev_dp;
        std::optional<SystemParams> prev_params;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto p = spec.apply(cfg.params, values[i]);
            std::optional<double> start;
            if (prev_dp) start = *prev_dp + (p.delta_tau - prev_params->delta_tau);
            table.rows[i].axis_value = values[i];
            table.rows[i].result = run_point_at(cfg, p, start);
            const auto& st = table.rows[i].result.state;
            if (st && st->converged) {
                prev_dp = st->delta_prime.value();
                prev_params = p;
            }
        }
        return table;
    }

    table.threads = std::min<int>(worker_count(), static_cast<int>(values.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            table.rows[i].axis_value = values[i];
            table.rows[i].result = run_point_at(cfg, spec.apply(cfg.params, values[i]), std::nullopt);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < table.threads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    return table;
}

}  // namespace microlaser
