#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "microlaser/params.hpp"
#include "microlaser/semiclassical.hpp"
#include "microlaser/spectrum.hpp"
#include "microlaser/steady_state.hpp"

namespace microlaser {

enum class Mode { quantum, semiclassical, oracle, compare };
enum class SweepAxis { delta, g, n_atoms };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);
SweepAxis parse_axis(const std::string& s);
std::string to_string(SweepAxis a);

struct SweepSpec {
    SweepAxis axis = SweepAxis::delta;
    double from = 0.0;  ///< delta axis in units of gamma_c, g axis as g*tau, n_atoms as N
    double to = 0.0;
    int points = 2;
    bool log_spacing = false;

    void validate() const;
    std::vector<double> values() const;
    /// params with the swept quantity set to v.
    SystemParams apply(const SystemParams& base, double v) const;
};

struct SurfaceSpec {
    std::pair<double, double> n_range{1.0, 2000.0};
    std::pair<double, double> delta_range{-0.3, 0.0};  ///< units of 1/tau
    int n_points = 256;
    int delta_points = 256;
    std::vector<double> levels;  ///< N values for intersection extraction

    void validate() const;
};

struct OutputSpec {
    std::string directory = "out";
    bool csv = true;
    bool json = true;
    bool svg = false;
    bool allow_unconverged = false;

    /// "csv,json,svg" style list.
    void set_formats(const std::string& list);
};

struct RunConfig {
    SystemParams params;
    Mode mode = Mode::quantum;
    std::optional<SweepSpec> sweep;
    std::optional<GridSpec> spectrum_grid;
    bool emit_spectrum = true;
    bool correlation_only = false;
    bool cold_start = false;
    SteadyStateOptions solver;
    semiclassical::BranchOptions branches;
    std::optional<SurfaceSpec> surfaces;
    OutputSpec output;
    std::string name;  ///< recipe name, defaults to the config file stem

    void validate() const;
};

/// INI grammar with sections [system], [run], [sweep], [spectrum], [solver],
/// [semiclassical], [surfaces], [output], [coupling_average]. See README.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

/// Parses a whitespace- or comma-separated list of numbers.
std::vector<double> parse_number_list(const std::string& s);

}  // namespace microlaser
