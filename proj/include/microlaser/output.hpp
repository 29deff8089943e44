#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "microlaser/config.hpp"
#include "microlaser/runner.hpp"

namespace microlaser::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal; "nan"/"inf" spelled out.
std::string format_number(double v);
/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

json params_json(const SystemParams& p);
SystemParams params_from_json(const json& j);

/// Flat quantum statistics; round-trips through JSON exactly.
struct QuantumSummary {
    SystemParams params;
    double delta_prime_per_tau = 0.0;
    double mean_n = 0.0;
    std::optional<double> mandel_q;
    double mean_pulling_per_gamma_c = 0.0;
    double pulling_std_per_gamma_c = 0.0;
    double mean_diffusion_per_gamma_c = 0.0;
    double residual_per_tau = 0.0;
    int n_max = 0;
    double tail_mass = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string method;
    bool nonunique = false;
    std::vector<int> trapping_flags;
    std::vector<std::string> warnings;

    bool operator==(const QuantumSummary&) const = default;
};

QuantumSummary summarize(const SteadyState& s);
json to_json(const QuantumSummary& s);
QuantumSummary quantum_summary_from_json(const json& j);

json spectrum_json(const Spectrum& s);
json branches_json(const semiclassical::BranchSet& b, const SystemParams& p);
json comparison_json(const Comparison& c);
json validation_json(const oracle::ValidationReport& r);
json point_json(const PointResult& r);
json sweep_json(const SweepTable& t);

void write_spectrum_csv(std::ostream& os, const Spectrum& s);
void write_sweep_csv(std::ostream& os, const SweepTable& t);
void write_branches_csv(std::ostream& os, const semiclassical::BranchSet& b, const SystemParams& p);

struct SurfaceLevel {
    double n_atoms = 0.0;
    std::vector<semiclassical::SurfacePoint> points;
};

/// Inputs for emit_plotdata; fill the members the chosen kind needs.
struct PlotSource {
    const Spectrum* spectrum = nullptr;
    const Spectrum* reference = nullptr;  ///< optional overlay (oracle)
    const SweepTable* sweep = nullptr;
    const semiclassical::SurfaceGrid* surface = nullptr;
    std::vector<SurfaceLevel> intersections;
};

/// Supported kinds: xi, spectrum, sweep, surface. Writes <stem>*.dat tables
/// and <stem>*.svg renderings into dir; returns the paths written.
std::vector<std::filesystem::path> emit_plotdata(const std::string& kind, const PlotSource& src,
                                                 const std::filesystem::path& dir, const std::string& stem);

struct Series {
    std::string label;
    std::vector<double> x, y;
};
std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series);
std::string svg_heatmap(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& values, const std::vector<std::uint8_t>& defined,
                        const std::vector<std::pair<double, double>>& overlay);

/// Writes result.json, spectrum.csv and plots for a point per the output flags.
std::vector<std::filesystem::path> write_point(const PointResult& r, const RunConfig& cfg,
                                               const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_sweep(const SweepTable& t, const RunConfig& cfg,
                                               const std::filesystem::path& dir);

/// The only file carrying wall-clock content.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::vector<std::filesystem::path>& files);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace microlaser::io
