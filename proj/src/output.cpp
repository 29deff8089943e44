#include "microlaser/output.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "microlaser/errors.hpp"
#include "microlaser/kernel.hpp"

namespace microlaser::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json params_json(const SystemParams& p) {
    json j;
    j["g_tau"] = p.g_tau;
    j["gamma_c_tau"] = p.gamma_c_tau;
    j["n_atoms"] = p.n_atoms;
    j["delta_per_tau"] = p.delta_tau;
    j["delta_per_gamma_c"] = p.delta_over_gamma_c();
    j["threshold_atoms"] = p.threshold_atoms();
    j["pump_theta_sq"] = p.pump_theta_sq();
    j["n_ex"] = p.n_ex();
    return j;
}

SystemParams params_from_json(const json& j) {
    SystemParams p;
    p.g_tau = j.at("g_tau").get<double>();
    p.gamma_c_tau = j.at("gamma_c_tau").get<double>();
    p.n_atoms = j.at("n_atoms").get<double>();
    p.delta_tau = j.at("delta_per_tau").get<double>();
    return p;
}

QuantumSummary summarize(const SteadyState& s) {
    const double gc = s.params.gamma_c_tau;
    QuantumSummary q;
    q.params = s.params;
    q.delta_prime_per_tau = s.delta_prime.value();
    q.mean_n = s.dist.mean_n;
    q.mandel_q = s.dist.mandel_q;
    q.mean_pulling_per_gamma_c = s.mean_pulling / gc;
    q.pulling_std_per_gamma_c = s.pulling_std / gc;
    q.mean_diffusion_per_gamma_c = s.mean_diffusion / gc;
    q.residual_per_tau = s.residual;
    q.n_max = s.dist.n_max;
    q.tail_mass = s.dist.tail_mass;
    q.converged = s.converged;
    q.iterations = s.iterations;
    q.method = s.method;
    q.nonunique = s.nonunique;
    q.trapping_flags = s.trapping_flags;
    q.warnings = s.warnings;
    return q;
}

json to_json(const QuantumSummary& s) {
    json j;
    j["params"] = params_json(s.params);
    j["delta_prime_per_tau"] = s.delta_prime_per_tau;
    j["delta_prime_per_gamma_c"] = s.delta_prime_per_tau / s.params.gamma_c_tau;
    j["mean_n"] = s.mean_n;
    j["mandel_q"] = optional_number(s.mandel_q);
    j["mean_pulling_per_gamma_c"] = s.mean_pulling_per_gamma_c;
    j["pulling_std_per_gamma_c"] = s.pulling_std_per_gamma_c;
    j["mean_diffusion_per_gamma_c"] = s.mean_diffusion_per_gamma_c;
    j["residual_per_tau"] = s.residual_per_tau;
    j["n_max"] = s.n_max;
    j["tail_mass"] = s.tail_mass;
    j["converged"] = s.converged;
    j["iterations"] = s.iterations;
    j["method"] = s.method;
    j["nonunique"] = s.nonunique;
    j["trapping_flags"] = s.trapping_flags;
    j["warnings"] = s.warnings;
    return j;
}

QuantumSummary quantum_summary_from_json(const json& j) {
    QuantumSummary s;
    s.params = params_from_json(j.at("params"));
    s.delta_prime_per_tau = j.at("delta_prime_per_tau").get<double>();
    s.mean_n = j.at("mean_n").get<double>();
    if (!j.at("mandel_q").is_null()) s.mandel_q = j.at("mandel_q").get<double>();
    s.mean_pulling_per_gamma_c = j.at("mean_pulling_per_gamma_c").get<double>();
    s.pulling_std_per_gamma_c = j.at("pulling_std_per_gamma_c").get<double>();
    s.mean_diffusion_per_gamma_c = j.at("mean_diffusion_per_gamma_c").get<double>();
    s.residual_per_tau = j.at("residual_per_tau").get<double>();
    s.n_max = j.at("n_max").get<int>();
    s.tail_mass = j.at("tail_mass").get<double>();
    s.converged = j.at("converged").get<bool>();
    s.iterations = j.at("iterations").get<int>();
    s.method = j.at("method").get<std::string>();
    s.nonunique = j.at("nonunique").get<bool>();
    s.trapping_flags = j.at("trapping_flags").get<std::vector<int>>();
    s.warnings = j.at("warnings").get<std::vector<std::string>>();
    return s;
}

json spectrum_json(const Spectrum& s) {
    json j;
    json grid;
    grid["min_per_gamma_c"] = s.grid.empty() ? 0.0 : s.grid.front();
    grid["max_per_gamma_c"] = s.grid.empty() ? 0.0 : s.grid.back();
    grid["points"] = s.grid.size();
    j["grid"] = grid;
    j["components_kept"] = s.components_kept;
    json peaks = json::array();
    for (const auto& p : s.peaks) {
        json q;
        q["center_per_gamma_c"] = p.center;
        q["height"] = p.height;
        q["hwhm_per_gamma_c"] = p.hwhm;
        q["area_share"] = p.area_share;
        peaks.push_back(q);
    }
    j["peaks"] = peaks;
    j["warnings"] = s.warnings;
    return j;
}

json branches_json(const semiclassical::BranchSet& b, const SystemParams& p) {
    json j;
    j["n_scan_max"] = b.n_scan_max;
    j["scan_points"] = b.scan_points;
    json arr = json::array();
    for (const auto& br : b.branches) {
        json q;
        q["branch_index"] = br.branch_index;
        q["n"] = br.n;
        q["delta_per_gamma_c"] = br.delta_tau / p.gamma_c_tau;
        q["delta_per_tau"] = br.delta_tau;
        q["residual_intensity"] = br.residual_intensity;
        q["residual_frequency_per_tau"] = br.residual_frequency;
        q["stable"] = br.stable;
        arr.push_back(q);
    }
    j["branches"] = arr;
    j["warnings"] = b.warnings;
    return j;
}

json comparison_json(const Comparison& c) {
    json j;
    j["quantum_n"] = c.quantum_n;
    j["quantum_pulling_per_gamma_c"] = c.quantum_pulling;
    j["semiclassical_n"] = c.semiclassical_n;
    j["semiclassical_pulling_per_gamma_c"] = c.semiclassical_pulling;
    j["branch_index"] = c.branch_index;
    j["n_rel_deviation"] = c.n_rel_deviation;
    j["pulling_deviation_per_gamma_c"] = c.pulling_deviation;
    j["n_threshold"] = Comparison::kNThreshold;
    j["pulling_threshold_per_gamma_c"] = Comparison::kPullingThreshold;
    j["exceeds_thresholds"] = c.exceeds;
    return j;
}

json validation_json(const oracle::ValidationReport& r) {
    json j;
    j["tv_distance"] = r.tv_distance;
    json d;
    d["t_reached_tau"] = r.diagonal.t_reached;
    d["derivative_norm_per_tau"] = r.diagonal.derivative_norm;
    d["stationary"] = r.diagonal.stationary;
    d["max_trace_error"] = r.diagonal.max_trace_error;
    d["steps"] = r.diagonal.stats.steps;
    d["implicit"] = r.diagonal.stats.implicit;
    j["diagonal"] = d;
    json c;
    c["samples"] = r.correlation.t.size();
    c["t_end_tau"] = r.correlation.t.empty() ? 0.0 : r.correlation.t.back();
    c["window_tau"] = r.correlation_window;
    c["max_error_over_mean_n"] = r.correlation_max_error;
    c["steps"] = r.correlation.stats.steps;
    c["rejected"] = r.correlation.stats.rejected;
    c["implicit"] = r.correlation.stats.implicit;
    j["correlation"] = c;
    j["spectral_l1"] = r.spectral_l1;
    j["analytic_spectrum"] = spectrum_json(r.analytic);
    j["oracle_spectrum"] = spectrum_json(r.oracle.spectrum);
    json m;
    m["n_peak"] = r.mode.n_peak;
    m["decay_fit_per_gamma_c"] = r.mode.decay_fit;
    m["decay_exact_per_gamma_c"] = r.mode.decay_exact;
    m["rotation_fit_per_gamma_c"] = r.mode.rotation_fit;
    m["rotation_exact_per_gamma_c"] = r.mode.rotation_exact;
    m["decay_rel_error"] = r.mode.decay_rel_error;
    m["rotation_rel_error"] = r.mode.rotation_rel_error;
    m["phase_rotation_residual_per_gamma_c"] = r.mode.phase_rotation_residual;
    j["dominant_mode"] = m;
    j["warnings"] = r.warnings;
    return j;
}

json point_json(const PointResult& r) {
    json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "point";
    j["mode"] = to_string(r.mode);
    j["params"] = params_json(r.params);
    if (r.state) j["quantum"] = to_json(summarize(*r.state));
    if (r.spectrum) j["spectrum"] = spectrum_json(*r.spectrum);
    if (r.branches) j["semiclassical"] = branches_json(*r.branches, r.params);
    if (r.comparison) j["comparison"] = comparison_json(*r.comparison);
    if (r.validation) j["oracle"] = validation_json(*r.validation);
    j["errors"] = r.errors;
    j["ok"] = r.ok();
    return j;
}

json sweep_json(const SweepTable& t) {
    json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "sweep";
    j["mode"] = to_string(t.mode);
    json s;
    s["axis"] = to_string(t.spec.axis);
    s["axis_unit"] = t.spec.axis == SweepAxis::delta ? "per_gamma_c" : (t.spec.axis == SweepAxis::g ? "g_tau" : "atoms");
    s["from"] = t.spec.from;
    s["to"] = t.spec.to;
    s["points"] = t.spec.points;
    s["spacing"] = t.spec.log_spacing ? "log" : "linear";
    s["warm_started"] = t.warm_started;
    j["sweep"] = s;
    json rows = json::array();
    for (const auto& row : t.rows) {
        json q = point_json(row.result);
        q.erase("schema");
        q.erase("kind");
        json e;
        e["axis_value"] = row.axis_value;
        for (auto it = q.begin(); it != q.end(); ++it) e[it.key()] = it.value();
        rows.push_back(e);
    }
    j["rows"] = rows;
    j["all_ok"] = t.all_ok();
    return j;
}

void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
    os << "nu_minus_omega_c_per_gamma_c,density,raw_density\r\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        os << format_number(s.grid[i]) << ',' << format_number(s.density[i]) << ','
           << format_number(s.raw_density[i]) << "\r\n";
}

void write_branches_csv(std::ostream& os, const semiclassical::BranchSet& b, const SystemParams& p) {
    os << "branch_index,n,delta_per_gamma_c,residual_intensity,residual_frequency_per_tau,stable\r\n";
    for (const auto& br : b.branches)
        os << br.branch_index << ',' << format_number(br.n) << ',' << format_number(br.delta_tau / p.gamma_c_tau)
           << ',' << format_number(br.residual_intensity) << ',' << format_number(br.residual_frequency) << ','
           << (br.stable ? "true" : "false") << "\r\n";
}

namespace {

std::string axis_header(SweepAxis a) {
    switch (a) {
        case SweepAxis::delta: return "delta_per_gamma_c";
        case SweepAxis::g: return "g_tau";
        case SweepAxis::n_atoms: return "n_atoms";
    }
    return "axis";
}

std::string join_numbers(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_number(v[i]);
    return out;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepTable& t) {
    const bool quantum = t.mode != Mode::semiclassical;
    const bool semi = t.mode == Mode::semiclassical || t.mode == Mode::compare;
    os << axis_header(t.spec.axis);
    if (quantum)
        os << ",mean_n,mean_pulling_per_gamma_c,pulling_std_per_gamma_c,mean_diffusion_per_gamma_c"
              ",delta_prime_per_gamma_c,mandel_q,converged,method,iterations,nonunique,trapping";
    if (semi) os << ",branch_count,branch_n,branch_delta_per_gamma_c,branch_stable";
    if (t.mode == Mode::compare)
        os << ",sc_n,sc_pulling_per_gamma_c,n_rel_deviation,pulling_deviation_per_gamma_c,exceeds";
    os << ",ok,errors\r\n";
    for (const auto& row : t.rows) {
        const auto& r = row.result;
        os << format_number(row.axis_value);
        if (quantum) {
            if (r.state) {
                const auto q = summarize(*r.state);
                os << ',' << format_number(q.mean_n) << ',' << format_number(q.mean_pulling_per_gamma_c) << ','
                   << format_number(q.pulling_std_per_gamma_c) << ',' << format_number(q.mean_diffusion_per_gamma_c)
                   << ',' << format_number(q.delta_prime_per_tau / q.params.gamma_c_tau) << ','
                   << (q.mandel_q ? format_number(*q.mandel_q) : "") << ',' << (q.converged ? "true" : "false")
                   << ',' << q.method << ',' << q.iterations << ',' << (q.nonunique ? "true" : "false") << ','
                   << (q.trapping_flags.empty() ? "false" : "true");
            } else {
                os << ",,,,,,,false,,,,";
            }
        }
        if (semi) {
            if (r.branches) {
                std::vector<double> ns, ds, st;
                for (const auto& b : r.branches->branches) {
                    ns.push_back(b.n);
                    ds.push_back(b.delta_tau / r.params.gamma_c_tau);
                    st.push_back(b.stable ? 1.0 : 0.0);
                }
                os << ',' << ns.size() << ',' << csv_field(join_numbers(ns)) << ','
                   << csv_field(join_numbers(ds)) << ',' << csv_field(join_numbers(st));
            } else {
                os << ",,,,";
            }
        }
        if (t.mode == Mode::compare) {
            if (r.comparison) {
                const auto& c = *r.comparison;
                os << ',' << format_number(c.semiclassical_n) << ',' << format_number(c.semiclassical_pulling)
                   << ',' << format_number(c.n_rel_deviation) << ',' << format_number(c.pulling_deviation) << ','
                   << (c.exceeds ? "true" : "false");
            } else {
                os << ",,,,,";
            }
        }
        std::string errs;
        for (std::size_t i = 0; i < r.errors.size(); ++i) errs += (i ? "; " : "") + r.errors[i];
        os << ',' << (r.ok() ? "true" : "false") << ',' << csv_field(errs) << "\r\n";
    }
}

namespace {

struct Frame {
    double x0 = 70, y0 = 30, w = 540, h = 300;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    double px(double x) const { return x0 + (x - xmin) / (xmax - xmin) * w; }
    double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

void pad_range(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double c = lo;
        lo = c - (std::abs(c) > 0 ? 0.5 * std::abs(c) : 1.0);
        hi = c + (std::abs(c) > 0 ? 0.5 * std::abs(c) : 1.0);
    }
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string axes(const Frame& f, const std::string& title, const std::string& xlabel, const std::string& ylabel) {
    std::ostringstream os;
    os << "<rect x=\"" << fixed(f.x0) << "\" y=\"" << fixed(f.y0) << "\" width=\"" << fixed(f.w) << "\" height=\""
       << fixed(f.h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(f.x0 + f.w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(title) << "</text>\n";
    os << "<text x=\"" << fixed(f.x0 + f.w / 2) << "\" y=\"" << fixed(f.y0 + f.h + 40)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(xlabel) << "</text>\n";
    os << "<text x=\"15\" y=\"" << fixed(f.y0 + f.h / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
       << "transform=\"rotate(-90 15 " << fixed(f.y0 + f.h / 2) << ")\">" << xml_escape(ylabel) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = f.xmin + (f.xmax - f.xmin) * k / 4;
        const double yv = f.ymin + (f.ymax - f.ymin) * k / 4;
        os << "<text x=\"" << fixed(f.px(xv)) << "\" y=\"" << fixed(f.y0 + f.h + 16)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << xml_escape(format_number(std::round(xv * 1e4) / 1e4))
           << "</text>\n";
        os << "<text x=\"" << fixed(f.x0 - 4) << "\" y=\"" << fixed(f.py(yv) + 3)
           << "\" text-anchor=\"end\" font-size=\"10\">" << xml_escape(format_number(std::round(yv * 1e4) / 1e4))
           << "</text>\n";
    }
    return os.str();
}

}  // namespace

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series) {
    Frame f;
    f.xmin = f.ymin = 1e300;
    f.xmax = f.ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            f.xmin = std::min(f.xmin, s.x[i]);
            f.xmax = std::max(f.xmax, s.x[i]);
            f.ymin = std::min(f.ymin, s.y[i]);
            f.ymax = std::max(f.ymax, s.y[i]);
        }
    if (f.xmin > f.xmax) f.xmin = 0, f.xmax = 1, f.ymin = 0, f.ymax = 1;
    pad_range(f.xmin, f.xmax);
    pad_range(f.ymin, f.ymax);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    os << axes(f, title, xlabel, ylabel);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % 6];
        // Break the polyline at non-finite values.
        std::string pts;
        auto flush = [&]() {
            if (!pts.empty())
                os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts
                   << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            pts += (pts.empty() ? "" : " ") + fixed(f.px(s.x[i])) + "," + fixed(f.py(s.y[i]));
        }
        flush();
        os << "<text x=\"" << fixed(f.x0 + f.w - 5) << "\" y=\"" << fixed(f.y0 + 15 + 14 * k)
           << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << xml_escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string svg_heatmap(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& values, const std::vector<std::uint8_t>& defined,
                        const std::vector<std::pair<double, double>>& overlay) {
    const std::size_t cols = x.size(), rows = y.size();
    if (values.size() != cols * rows || defined.size() != values.size())
        throw InvalidArgument("heatmap value array does not match the axes");
    Frame f;
    f.xmin = x.front();
    f.xmax = x.back();
    f.ymin = y.front();
    f.ymax = y.back();
    pad_range(f.xmin, f.xmax);
    pad_range(f.ymin, f.ymax);

    // Color scale from the 2nd to 98th percentile of defined values.
    std::vector<double> finite;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (defined[k] && std::isfinite(values[k])) finite.push_back(values[k]);
    double lo = 0, hi = 1;
    if (!finite.empty()) {
        std::sort(finite.begin(), finite.end());
        lo = finite[finite.size() * 2 / 100];
        hi = finite[std::min(finite.size() - 1, finite.size() * 98 / 100)];
        if (!(hi > lo)) hi = lo + 1;
    }
    const int anchors[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
    auto color = [&](double v) {
        double u = std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * 4.0;
        const int k = std::min(3, static_cast<int>(u));
        u -= k;
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                      static_cast<int>(anchors[k][0] + u * (anchors[k + 1][0] - anchors[k][0])),
                      static_cast<int>(anchors[k][1] + u * (anchors[k + 1][1] - anchors[k][1])),
                      static_cast<int>(anchors[k][2] + u * (anchors[k + 1][2] - anchors[k][2])));
        return std::string(buf);
    };

    const std::size_t cstep = std::max<std::size_t>(1, (cols + 159) / 160);
    const std::size_t rstep = std::max<std::size_t>(1, (rows + 159) / 160);
    const double cw = f.w / static_cast<double>((cols + cstep - 1) / cstep);
    const double rh = f.h / static_cast<double>((rows + rstep - 1) / rstep);
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    std::size_t ci = 0;
    for (std::size_t c = 0; c < cols; c += cstep, ++ci) {
        std::size_t ri = 0;
        for (std::size_t r = 0; r < rows; r += rstep, ++ri) {
            const std::size_t k = r * cols + c;
            const std::string fill = defined[k] && std::isfinite(values[k]) ? color(values[k]) : "#bbbbbb";
            os << "<rect x=\"" << fixed(f.x0 + ci * cw) << "\" y=\"" << fixed(f.y0 + f.h - (ri + 1) * rh)
               << "\" width=\"" << fixed(cw + 0.05) << "\" height=\"" << fixed(rh + 0.05) << "\" fill=\"" << fill
               << "\"/>\n";
        }
    }
    os << axes(f, title + " (color " + format_number(std::round(lo * 100) / 100) + " .. " +
                      format_number(std::round(hi * 100) / 100) + ")",
               "n", "delta*tau");
    for (const auto& [px, py] : overlay)
        os << "<circle cx=\"" << fixed(f.px(px)) << "\" cy=\"" << fixed(f.py(py))
           << "\" r=\"2\" fill=\"red\" stroke=\"none\"/>\n";
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << content;
}

std::vector<std::filesystem::path> emit_plotdata(const std::string& kind, const PlotSource& src,
                                                 const std::filesystem::path& dir, const std::string& stem) {
    std::vector<std::filesystem::path> out;
    auto put = [&](const std::string& name, const std::string& content) {
        const auto p = dir / name;
        write_text(p, content);
        out.push_back(p);
    };

    if (kind == "xi") {
        std::ostringstream dat;
        Series s{"xi(Phi)", {}, {}};
        dat << "# Phi xi\n";
        for (int i = 0; i <= 3000; ++i) {
            const double phi = 0.01 * i;
            const double v = kernel::xi(phi);
            dat << format_number(phi) << ' ' << format_number(v) << '\n';
            s.x.push_back(phi);
            s.y.push_back(v);
        }
        put(stem + ".dat", dat.str());
        put(stem + ".svg", svg_line_plot("characteristic function xi", "Phi", "xi", {s}));
        return out;
    }
    if (kind == "spectrum") {
        if (!src.spectrum) throw InvalidArgument("plot kind 'spectrum' needs a spectrum");
        const auto& sp = *src.spectrum;
        std::ostringstream dat;
        dat << "# nu_minus_omega_c_per_gamma_c density" << (src.reference ? " reference_density" : "") << '\n';
        for (std::size_t i = 0; i < sp.grid.size(); ++i) {
            dat << format_number(sp.grid[i]) << ' ' << format_number(sp.density[i]);
            if (src.reference && i < src.reference->density.size())
                dat << ' ' << format_number(src.reference->density[i]);
            dat << '\n';
        }
        std::vector<Series> ss{{"analytic", sp.grid, sp.density}};
        if (src.reference) ss.push_back({"oracle", src.reference->grid, src.reference->density});
        put(stem + ".dat", dat.str());
        put(stem + ".svg", svg_line_plot("spectrum", "(nu - omega_c)/gamma_c", "S (unit height)", ss));
        return out;
    }
    if (kind == "sweep") {
        if (!src.sweep) throw InvalidArgument("plot kind 'sweep' needs a sweep table");
        const auto& t = *src.sweep;
        const std::string axis = axis_header(t.spec.axis);
        std::ostringstream dat;
        Series n{"<n>", {}, {}}, d{"<delta_n>/gamma_c", {}, {}}, dd{"Delta delta_n/gamma_c", {}, {}},
            dif{"<D_n>/gamma_c", {}, {}};
        std::vector<Series> branch_n, branch_d;
        dat << "# " << axis << " mean_n mean_pulling_per_gamma_c pulling_std_per_gamma_c mean_diffusion_per_gamma_c\n";
        for (const auto& row : t.rows) {
            const auto& r = row.result;
            if (r.state) {
                const auto q = summarize(*r.state);
                const double nan = std::nan("");
                const bool ok = q.converged;
                dat << format_number(row.axis_value) << ' ' << format_number(q.mean_n) << ' '
                    << format_number(q.mean_pulling_per_gamma_c) << ' ' << format_number(q.pulling_std_per_gamma_c)
                    << ' ' << format_number(q.mean_diffusion_per_gamma_c) << '\n';
                n.x.push_back(row.axis_value);
                n.y.push_back(ok ? q.mean_n : nan);
                d.x.push_back(row.axis_value);
                d.y.push_back(ok ? q.mean_pulling_per_gamma_c : nan);
                dd.x.push_back(row.axis_value);
                dd.y.push_back(ok ? q.pulling_std_per_gamma_c : nan);
                dif.x.push_back(row.axis_value);
                dif.y.push_back(ok ? q.mean_diffusion_per_gamma_c : nan);
            }
            if (r.branches) {
                if (!r.state) dat << format_number(row.axis_value);
                for (const auto& b : r.branches->branches) {
                    if (b.n <= 0.0) continue;
                    const std::size_t k = static_cast<std::size_t>(b.branch_index);
                    while (branch_n.size() < k) {
                        branch_n.push_back({"branch " + std::to_string(branch_n.size() + 1), {}, {}});
                        branch_d.push_back({"branch " + std::to_string(branch_d.size() + 1), {}, {}});
                    }
                    branch_n[k - 1].x.push_back(row.axis_value);
                    branch_n[k - 1].y.push_back(b.n);
                    branch_d[k - 1].x.push_back(row.axis_value);
                    branch_d[k - 1].y.push_back(b.delta_tau / r.params.gamma_c_tau);
                    if (!r.state) dat << ' ' << format_number(b.n) << ' ' << format_number(b.delta_tau / r.params.gamma_c_tau);
                }
                if (!r.state) dat << '\n';
            }
        }
        put(stem + ".dat", dat.str());
        if (!n.x.empty()) {
            std::vector<Series> sn{n}, sd{d, dd, dif};
            for (const auto& b : branch_n) sn.push_back(b);
            for (const auto& b : branch_d) sd.push_back(b);
            put(stem + "_n.svg", svg_line_plot("mean photon number", axis, "<n>", sn));
            put(stem + "_pulling.svg", svg_line_plot("pulling and broadening", axis, "units of gamma_c", sd));
        } else {
            put(stem + "_n.svg", svg_line_plot("semiclassical branches", axis, "n", branch_n));
            put(stem + "_pulling.svg", svg_line_plot("semiclassical pulling", axis, "delta/gamma_c", branch_d));
        }
        return out;
    }
    if (kind == "surface") {
        if (!src.surface) throw InvalidArgument("plot kind 'surface' needs surface grids");
        const auto& g = *src.surface;
        auto table = [&](const std::vector<double>& v, const std::vector<std::uint8_t>& def) {
            std::ostringstream dat;
            dat << "# n delta_per_tau N (nan where undefined)\n";
            for (std::size_t r = 0; r < g.rows(); ++r) {
                for (std::size_t c = 0; c < g.cols(); ++c) {
                    const std::size_t k = g.at(r, c);
                    dat << format_number(g.n_axis[c]) << ' ' << format_number(g.delta_axis[r]) << ' '
                        << (def[k] ? format_number(v[k]) : "nan") << '\n';
                }
                dat << '\n';
            }
            return dat.str();
        };
        std::vector<std::pair<double, double>> overlay;
        std::ostringstream inter;
        inter << "# n_atoms n delta_per_tau\n";
        for (const auto& lvl : src.intersections)
            for (const auto& p : lvl.points) {
                overlay.emplace_back(p.n, p.delta_tau);
                inter << format_number(lvl.n_atoms) << ' ' << format_number(p.n) << ' ' << format_number(p.delta_tau)
                      << '\n';
            }
        put(stem + "_intensity.dat", table(g.intensity, g.intensity_defined));
        put(stem + "_pulling.dat", table(g.pulling, g.pulling_defined));
        put(stem + "_intersections.dat", inter.str());
        put(stem + "_intensity.svg",
            svg_heatmap("N from the intensity equation", g.n_axis, g.delta_axis, g.intensity, g.intensity_defined, overlay));
        put(stem + "_pulling.svg",
            svg_heatmap("N from the frequency equation", g.n_axis, g.delta_axis, g.pulling, g.pulling_defined, overlay));
        return out;
    }
    throw InvalidArgument("unsupported plot kind '" + kind + "' (supported: xi, spectrum, sweep, surface)");
}

std::vector<std::filesystem::path> write_point(const PointResult& r, const RunConfig& cfg,
                                               const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (cfg.output.json) {
        write_text(dir / "result.json", point_json(r).dump(2) + "\n");
        out.push_back(dir / "result.json");
    }
    if (cfg.output.csv) {
        if (r.spectrum) {
            std::ostringstream os;
            write_spectrum_csv(os, *r.spectrum);
            write_text(dir / "spectrum.csv", os.str());
            out.push_back(dir / "spectrum.csv");
        }
        if (r.branches) {
            std::ostringstream os;
            write_branches_csv(os, *r.branches, r.params);
            write_text(dir / "branches.csv", os.str());
            out.push_back(dir / "branches.csv");
        }
        if (r.validation) {
            std::ostringstream os;
            oracle::write_correlation_csv(os, r.validation->correlation);
            write_text(dir / "correlation.csv", os.str());
            out.push_back(dir / "correlation.csv");
            std::ostringstream os2;
            write_spectrum_csv(os2, r.validation->oracle.spectrum);
            write_text(dir / "oracle_spectrum.csv", os2.str());
            out.push_back(dir / "oracle_spectrum.csv");
        }
    }
    if (cfg.output.svg && r.spectrum) {
        PlotSource src;
        src.spectrum = &*r.spectrum;
        if (r.validation) src.reference = &r.validation->oracle.spectrum;
        for (auto& p : emit_plotdata("spectrum", src, dir, "spectrum")) out.push_back(p);
    }
    return out;
}

std::vector<std::filesystem::path> write_sweep(const SweepTable& t, const RunConfig& cfg,
                                               const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (cfg.output.json) {
        write_text(dir / "sweep.json", sweep_json(t).dump(2) + "\n");
        out.push_back(dir / "sweep.json");
    }
    if (cfg.output.csv) {
        std::ostringstream os;
        write_sweep_csv(os, t);
        write_text(dir / "sweep.csv", os.str());
        out.push_back(dir / "sweep.csv");
    }
    if (cfg.output.svg) {
        PlotSource src;
        src.sweep = &t;
        for (auto& p : emit_plotdata("sweep", src, dir, "sweep")) out.push_back(p);
    }
    return out;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::vector<std::filesystem::path>& files) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json j;
    j["schema"] = kSchemaVersion;
    j["command"] = command;
    j["created_utc"] = stamp;
    json list = json::array();
    for (const auto& f : files) list.push_back(std::filesystem::relative(f, dir).generic_string());
    j["files"] = list;
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

}  // namespace microlaser::io
