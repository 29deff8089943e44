#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microlaser/config.hpp"
#include "microlaser/oracle.hpp"
#include "microlaser/semiclassical.hpp"
#include "microlaser/spectrum.hpp"
#include "microlaser/steady_state.hpp"

namespace microlaser {

/// Quantum versus semiclassical at one operating point.
struct Comparison {
    double quantum_n = 0.0;
    double quantum_pulling = 0.0;  ///< units of gamma_c
    double semiclassical_n = 0.0;
    double semiclassical_pulling = 0.0;  ///< units of gamma_c
    int branch_index = 0;
    double n_rel_deviation = 0.0;
    double pulling_deviation = 0.0;  ///< units of gamma_c
    bool exceeds = false;            ///< n deviation >= 5% or pulling deviation >= 0.1

    static constexpr double kNThreshold = 0.05;
    static constexpr double kPullingThreshold = 0.1;
};

/// Picks the stable nonzero branch closest to the quantum mean photon
/// number, falling back to the n = 0 branch.
Comparison compare(const SteadyState& quantum, const semiclassical::BranchSet& branches);

struct PointResult {
    Mode mode = Mode::quantum;
    SystemParams params;
    std::optional<SteadyState> state;
    std::optional<Spectrum> spectrum;
    std::optional<semiclassical::BranchSet> branches;
    std::optional<Comparison> comparison;
    std::optional<oracle::ValidationReport> validation;
    std::vector<std::string> errors;

    /// False when any solve failed or did not converge.
    bool ok() const;
};

/// Runs one operating point; solver failures are recorded in `errors`.
PointResult run_point(const RunConfig& cfg);

/// Same as run_point with an explicit parameter set and warm start.
PointResult run_point_at(const RunConfig& cfg, const SystemParams& params,
                         std::optional<double> warm_delta_prime_tau = std::nullopt);

struct SweepRow {
    double axis_value = 0.0;
    PointResult result;
};

struct SweepTable {
    SweepSpec spec;
    Mode mode = Mode::quantum;
    std::vector<SweepRow> rows;
    bool warm_started = true;
    int threads = 1;

    bool all_ok() const;
};

/// Sweeps sequentially with warm starts, or in parallel (MICROLASER_THREADS
/// workers) when cold_start is set. Rows keep sweep order either way.
SweepTable run_sweep(const RunConfig& cfg);

/// Worker cap from MICROLASER_THREADS, defaulting to the hardware count.
int worker_count();

}  // namespace microlaser
