#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "microlaser/config.hpp"
#include "microlaser/errors.hpp"
#include "microlaser/output.hpp"
#include "microlaser/runner.hpp"

namespace fs = std::filesystem;
using namespace microlaser;

namespace {

struct Flags {
    std::string config;
    std::string mode;
    std::string out;
    std::string format;
    bool allow_unconverged = false;
    bool cold_start = false;
    std::string recipes = "docs/recipes";
};

RunConfig prepare(const Flags& f, const std::string& path) {
    RunConfig cfg = load_config(path);
    if (!f.mode.empty()) cfg.mode = parse_mode(f.mode);
    if (!f.format.empty()) cfg.output.set_formats(f.format);
    if (!f.out.empty()) cfg.output.directory = f.out;
    if (f.allow_unconverged) cfg.output.allow_unconverged = true;
    if (f.cold_start) cfg.cold_start = true;
    cfg.validate();
    return cfg;
}

void report(const PointResult& r, const std::string& label) {
    std::cout << label << ": ";
    if (r.state) {
        const auto q = io::summarize(*r.state);
        std::cout << "<n>=" << io::format_number(q.mean_n)
                  << " <delta_n>/gamma_c=" << io::format_number(q.mean_pulling_per_gamma_c)
                  << " iterations=" << q.iterations << (q.converged ? "" : " (not converged)");
    }
    if (r.branches) std::cout << " branches=" << r.branches->branches.size();
    if (r.comparison) std::cout << (r.comparison->exceeds ? " deviation=exceeds" : " deviation=within");
    if (r.validation)
        std::cout << " spectral_l1=" << io::format_number(r.validation->spectral_l1)
                  << " tv=" << io::format_number(r.validation->tv_distance);
    std::cout << '\n';
    for (const auto& e : r.errors) std::cerr << label << ": error: " << e << '\n';
}

// Returns true when every result converged.
bool run_point_cmd(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
    if (cfg.sweep) throw InvalidArgument("config has a [sweep] section; use the sweep verb");
    const auto r = run_point(cfg);
    report(r, cfg.name.empty() ? "point" : cfg.name);
    for (auto& p : io::write_point(r, cfg, dir)) files.push_back(p);
    return r.ok();
}

bool run_sweep_cmd(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
    const auto t = run_sweep(cfg);
    std::size_t bad = 0;
    for (const auto& row : t.rows) {
        if (!row.result.ok()) ++bad;
        for (const auto& e : row.result.errors)
            std::cerr << "sweep " << io::format_number(row.axis_value) << ": " << e << '\n';
    }
    std::cout << (cfg.name.empty() ? "sweep" : cfg.name) << ": " << t.rows.size() << " points, " << bad
              << " not converged, threads=" << t.threads << (t.warm_started ? " warm" : " cold") << '\n';
    for (auto& p : io::write_sweep(t, cfg, dir)) files.push_back(p);
    return bad == 0;
}

bool run_surfaces_cmd(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
    if (!cfg.surfaces) throw InvalidArgument("config needs a [surfaces] section");
    const auto& s = *cfg.surfaces;
    const auto grid = semiclassical::surface_grids(cfg.params, s.n_range, s.delta_range, s.n_points, s.delta_points);
    io::PlotSource src;
    src.surface = &grid;
    std::vector<double> levels = s.levels;
    if (levels.empty()) levels.push_back(cfg.params.n_atoms);
    for (double lv : levels) src.intersections.push_back({lv, semiclassical::surface_intersections(grid, lv)});
    for (auto& p : io::emit_plotdata("surface", src, dir, "surface")) files.push_back(p);
    std::cout << (cfg.name.empty() ? "surfaces" : cfg.name) << ": " << grid.cols() << "x" << grid.rows();
    for (const auto& l : src.intersections) std::cout << " N=" << io::format_number(l.n_atoms) << ":" << l.points.size();
    std::cout << '\n';
    return true;
}

bool dispatch(const RunConfig& cfg, const fs::path& dir, std::vector<fs::path>& files) {
    if (cfg.surfaces) return run_surfaces_cmd(cfg, dir, files);
    if (cfg.sweep) return run_sweep_cmd(cfg, dir, files);
    return run_point_cmd(cfg, dir, files);
}

int finish(bool ok, const RunConfig& cfg) {
    if (ok) return 0;
    if (cfg.output.allow_unconverged) {
        std::cerr << "warning: some results did not converge (allowed)\n";
        return 0;
    }
    std::cerr << "error: some results did not converge (pass --allow-unconverged to accept)\n";
    return 1;
}

std::string command_line(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) os << (i ? " " : "") << argv[i];
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Microlaser steady state, pulling and spectrum at arbitrary detuning"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", f.config, "INI run configuration")->check(CLI::ExistingFile);
        if (need_config) c->required();
        sub->add_option("--mode", f.mode, "quantum, semiclassical, oracle or compare");
        sub->add_option("--out", f.out, "output directory");
        sub->add_option("--format", f.format, "comma list of csv, json, svg");
        sub->add_flag("--allow-unconverged", f.allow_unconverged, "exit 0 even if a solve did not converge");
        sub->add_flag("--cold-start", f.cold_start, "solve sweep points independently");
    };
    auto* point = app.add_subcommand("point", "single operating point");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    auto* spectrum = app.add_subcommand("spectrum", "steady state plus spectrum");
    auto* surfaces = app.add_subcommand("surfaces", "semiclassical intensity and frequency surfaces");
    auto* validate = app.add_subcommand("validate", "compare against time evolution of the master equation");
    auto* figures = app.add_subcommand("figures", "run every recipe in the recipe directory");
    for (auto* s : {point, sweep, spectrum, surfaces, validate}) common(s, true);
    common(figures, false);
    figures->add_option("--recipes", f.recipes, "recipe directory")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        std::vector<fs::path> files;
        const std::string cmd = command_line(argc, argv);

        if (figures->parsed()) {
            std::vector<fs::path> recipes;
            for (const auto& e : fs::directory_iterator(f.recipes))
                if (e.path().extension() == ".ini") recipes.push_back(e.path());
            std::sort(recipes.begin(), recipes.end());
            const fs::path root = f.out.empty() ? fs::path("figures") : fs::path(f.out);
            Flags sub = f;
            sub.out.clear();
            bool ok = true;
            bool allow = f.allow_unconverged;
            for (const auto& r : recipes) {
                auto cfg = prepare(sub, r.string());
                if (f.format.empty()) cfg.output.set_formats("csv,json,svg");
                const fs::path dir = root / cfg.name;
                std::vector<fs::path> local;
                ok = dispatch(cfg, dir, local) && ok;
                files.insert(files.end(), local.begin(), local.end());
            }
            for (auto& p : io::emit_plotdata("xi", {}, root / "xi", "xi")) files.push_back(p);
            io::write_manifest(root, cmd, files);
            RunConfig dummy;
            dummy.output.allow_unconverged = allow;
            return finish(ok, dummy);
        }

        auto cfg = prepare(f, f.config);
        const fs::path dir = cfg.output.directory;
        bool ok = true;
        if (point->parsed()) {
            ok = run_point_cmd(cfg, dir, files);
        } else if (spectrum->parsed()) {
            cfg.mode = Mode::quantum;
            cfg.emit_spectrum = true;
            ok = run_point_cmd(cfg, dir, files);
        } else if (validate->parsed()) {
            cfg.mode = Mode::oracle;
            cfg.validate();
            ok = run_point_cmd(cfg, dir, files);
        } else if (sweep->parsed()) {
            ok = run_sweep_cmd(cfg, dir, files);
        } else if (surfaces->parsed()) {
            ok = run_surfaces_cmd(cfg, dir, files);
        }
        io::write_manifest(dir, cmd, files);
        return finish(ok, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
