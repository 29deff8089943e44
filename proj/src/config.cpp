#include "microlaser/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "microlaser/errors.hpp"

namespace microlaser {

namespace pt = boost::property_tree;

Mode parse_mode(const std::string& s) {
    if (s == "quantum") return Mode::quantum;
    if (s == "semiclassical") return Mode::semiclassical;
    if (s == "oracle") return Mode::oracle;
    if (s == "compare") return Mode::compare;
    throw InvalidArgument("unknown mode '" + s + "' (expected quantum, semiclassical, oracle, compare)");
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::quantum: return "quantum";
        case Mode::semiclassical: return "semiclassical";
        case Mode::oracle: return "oracle";
        case Mode::compare: return "compare";
    }
    return "?";
}

SweepAxis parse_axis(const std::string& s) {
    if (s == "delta") return SweepAxis::delta;
    if (s == "g") return SweepAxis::g;
    if (s == "n_atoms") return SweepAxis::n_atoms;
    throw InvalidArgument("unknown sweep axis '" + s + "' (expected delta, g, n_atoms)");
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::delta: return "delta";
        case SweepAxis::g: return "g";
        case SweepAxis::n_atoms: return "n_atoms";
    }
    return "?";
}

void SweepSpec::validate() const {
    if (points < 2) throw InvalidArgument("sweep needs points >= 2");
    if (!(std::isfinite(from) && std::isfinite(to)) || from == to)
        throw InvalidArgument("sweep range must be finite and non-degenerate");
    if (log_spacing && !(from > 0.0 && to > 0.0))
        throw InvalidArgument("log-spaced sweep needs positive endpoints");
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        v[i] = log_spacing ? from * std::pow(to / from, f) : from + (to - from) * f;
    }
    v.front() = from;
    v.back() = to;
    return v;
}

SystemParams SweepSpec::apply(const SystemParams& base, double v) const {
    SystemParams p = base;
    switch (axis) {
        case SweepAxis::delta: p.delta_tau = v * base.gamma_c_tau; break;
        case SweepAxis::g: p.g_tau = v; break;
        case SweepAxis::n_atoms: p.n_atoms = v; break;
    }
    return p;
}

void SurfaceSpec::validate() const {
    if (!(n_range.first >= 0.0 && n_range.second > n_range.first))
        throw InvalidArgument("surface n range must satisfy 0 <= min < max");
    if (!(delta_range.second > delta_range.first))
        throw InvalidArgument("surface delta range must satisfy min < max");
    if (n_points < 2 || delta_points < 2) throw InvalidArgument("surface resolution must be >= 2");
}

void OutputSpec::set_formats(const std::string& list) {
    csv = json = svg = false;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item == "csv") csv = true;
        else if (item == "json") json = true;
        else if (item == "svg") svg = true;
        else if (!item.empty()) throw InvalidArgument("unknown output format '" + item + "'");
    }
}

void RunConfig::validate() const {
    params.validate();
    if (sweep) sweep->validate();
    if (spectrum_grid) spectrum_grid->validate();
    if (surfaces) surfaces->validate();
    if (mode == Mode::oracle && !spectrum_grid && !correlation_only)
        throw InvalidArgument("oracle mode needs a [spectrum] grid or run.correlation_only = true");
    if (!solver.coupling_average.empty()) {
        double wsum = 0.0;
        for (const auto& node : solver.coupling_average) {
            if (!(node.g_tau > 0.0 && node.weight >= 0.0))
                throw InvalidArgument("coupling_average nodes need g > 0 and weight >= 0");
            wsum += node.weight;
        }
        if (!(wsum > 0.0)) throw InvalidArgument("coupling_average weights sum to zero");
    }
}

std::vector<double> parse_number_list(const std::string& s) {
    std::string t = s;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw InvalidArgument("not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

namespace {

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw InvalidArgument("not a boolean: '" + s + "'");
}

double get_number(const pt::ptree& tree, const std::string& key) {
    const auto raw = tree.get_optional<std::string>(key);
    if (!raw) throw InvalidArgument("missing required key '" + key + "'");
    const auto v = parse_number_list(*raw);
    if (v.size() != 1) throw InvalidArgument("expected one number for " + key);
    return v.front();
}

std::optional<double> opt_number(const pt::ptree& tree, const std::string& key) {
    if (!tree.get_optional<std::string>(key)) return std::nullopt;
    return get_number(tree, key);
}

const std::vector<std::string>& known_keys(const std::string& section) {
    static const std::vector<std::string> system{"g_tau", "gamma_c_tau", "n_atoms", "delta_over_gamma_c", "delta_tau"};
    static const std::vector<std::string> run{"mode", "correlation_only", "cold_start", "emit_spectrum", "name"};
    static const std::vector<std::string> sweep{"axis", "from", "to", "points", "spacing"};
    static const std::vector<std::string> spectrum{"min", "max", "points"};
    static const std::vector<std::string> solver{"tolerance", "damping", "damping_min", "max_iterations",
                                                 "n_max_cap", "tail_threshold", "trapping_threshold",
                                                 "bracket_fallback", "initial_delta_prime_over_gamma_c"};
    static const std::vector<std::string> semi{"n_scan_max", "log_points", "linear_points", "tolerance"};
    static const std::vector<std::string> surfaces{"n_min", "n_max", "delta_min", "delta_max",
                                                   "n_points", "delta_points", "levels"};
    static const std::vector<std::string> output{"directory", "formats", "allow_unconverged"};
    static const std::vector<std::string> coupling{"enabled", "g_tau", "weights"};
    static const std::vector<std::string> none;
    if (section == "system") return system;
    if (section == "run") return run;
    if (section == "sweep") return sweep;
    if (section == "spectrum") return spectrum;
    if (section == "solver") return solver;
    if (section == "semiclassical") return semi;
    if (section == "surfaces") return surfaces;
    if (section == "output") return output;
    if (section == "coupling_average") return coupling;
    return none;
}

}  // namespace

RunConfig parse_config(std::istream& is) {
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidArgument(std::string("config parse error: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
        const auto& keys = known_keys(section);
        if (keys.empty()) throw InvalidArgument("unknown config section [" + section + "]");
        for (const auto& kv : body)
            if (std::find(keys.begin(), keys.end(), kv.first) == keys.end())
                throw InvalidArgument("unknown key '" + kv.first + "' in [" + section + "]");
    }

    RunConfig cfg;
    const auto sys = tree.get_child_optional("system");
    if (!sys) throw InvalidArgument("config needs a [system] section");
    cfg.params.g_tau = get_number(*sys, "g_tau");
    cfg.params.gamma_c_tau = get_number(*sys, "gamma_c_tau");
    cfg.params.n_atoms = get_number(*sys, "n_atoms");
    const auto dg = opt_number(*sys, "delta_over_gamma_c");
    const auto dt = opt_number(*sys, "delta_tau");
    if (dg && dt) throw InvalidArgument("give either delta_over_gamma_c or delta_tau, not both");
    cfg.params.delta_tau = dg ? *dg * cfg.params.gamma_c_tau : dt.value_or(0.0);

    if (const auto run = tree.get_child_optional("run")) {
        if (auto m = run->get_optional<std::string>("mode")) cfg.mode = parse_mode(*m);
        if (auto v = run->get_optional<std::string>("correlation_only")) cfg.correlation_only = parse_bool(*v);
        if (auto v = run->get_optional<std::string>("cold_start")) cfg.cold_start = parse_bool(*v);
        if (auto v = run->get_optional<std::string>("emit_spectrum")) cfg.emit_spectrum = parse_bool(*v);
        if (auto v = run->get_optional<std::string>("name")) cfg.name = *v;
    }
    if (const auto sw = tree.get_child_optional("sweep")) {
        SweepSpec s;
        s.axis = parse_axis(sw->get<std::string>("axis"));
        s.from = get_number(*sw, "from");
        s.to = get_number(*sw, "to");
        s.points = static_cast<int>(get_number(*sw, "points"));
        const auto spacing = sw->get<std::string>("spacing", "linear");
        if (spacing != "linear" && spacing != "log")
            throw InvalidArgument("sweep spacing must be linear or log");
        s.log_spacing = spacing == "log";
        cfg.sweep = s;
    }
    if (const auto sp = tree.get_child_optional("spectrum")) {
        GridSpec g;
        g.min = get_number(*sp, "min");
        g.max = get_number(*sp, "max");
        g.points = static_cast<int>(get_number(*sp, "points"));
        cfg.spectrum_grid = g;
    }
    if (const auto so = tree.get_child_optional("solver")) {
        auto& o = cfg.solver;
        if (auto v = opt_number(*so, "tolerance")) o.tolerance = *v;
        if (auto v = opt_number(*so, "damping")) o.damping = *v;
        if (auto v = opt_number(*so, "damping_min")) o.damping_min = *v;
        if (auto v = opt_number(*so, "max_iterations")) o.max_iterations = static_cast<int>(*v);
        if (auto v = opt_number(*so, "n_max_cap")) o.n_max_cap = static_cast<int>(*v);
        if (auto v = opt_number(*so, "tail_threshold")) o.tail_threshold = *v;
        if (auto v = opt_number(*so, "trapping_threshold")) o.trapping_threshold = *v;
        if (auto v = so->get_optional<std::string>("bracket_fallback")) o.bracket_fallback = parse_bool(*v);
        if (auto v = opt_number(*so, "initial_delta_prime_over_gamma_c"))
            o.initial_delta_prime = *v * cfg.params.gamma_c_tau;
    }
    if (const auto sc = tree.get_child_optional("semiclassical")) {
        auto& b = cfg.branches;
        if (auto v = opt_number(*sc, "n_scan_max")) b.n_scan_max = *v;
        if (auto v = opt_number(*sc, "log_points")) b.log_points = static_cast<int>(*v);
        if (auto v = opt_number(*sc, "linear_points")) b.linear_points = static_cast<int>(*v);
        if (auto v = opt_number(*sc, "tolerance")) b.tolerance = *v;
    }
    if (const auto su = tree.get_child_optional("surfaces")) {
        SurfaceSpec s;
        s.n_range = {get_number(*su, "n_min"), get_number(*su, "n_max")};
        s.delta_range = {get_number(*su, "delta_min"), get_number(*su, "delta_max")};
        if (auto v = opt_number(*su, "n_points")) s.n_points = static_cast<int>(*v);
        if (auto v = opt_number(*su, "delta_points")) s.delta_points = static_cast<int>(*v);
        if (auto v = su->get_optional<std::string>("levels")) s.levels = parse_number_list(*v);
        cfg.surfaces = s;
    }
    if (const auto out = tree.get_child_optional("output")) {
        if (auto v = out->get_optional<std::string>("directory")) cfg.output.directory = *v;
        if (auto v = out->get_optional<std::string>("formats")) cfg.output.set_formats(*v);
        if (auto v = out->get_optional<std::string>("allow_unconverged")) cfg.output.allow_unconverged = parse_bool(*v);
    }
    if (const auto ca = tree.get_child_optional("coupling_average")) {
        const bool enabled = ca->get_optional<std::string>("enabled") ? parse_bool(ca->get<std::string>("enabled")) : false;
        if (enabled) {
            const auto g = parse_number_list(ca->get<std::string>("g_tau"));
            const auto w = parse_number_list(ca->get<std::string>("weights"));
            if (g.size() != w.size() || g.empty())
                throw InvalidArgument("coupling_average g_tau and weights need equal, nonzero length");
            for (std::size_t i = 0; i < g.size(); ++i) cfg.solver.coupling_average.push_back({g[i], w[i]});
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot open config file " + path);
    auto cfg = parse_config(is);
    if (cfg.name.empty()) cfg.name = std::filesystem::path(path).stem().string();
    return cfg;
}

}  // namespace microlaser
