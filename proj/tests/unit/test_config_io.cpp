#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "microlaser/errors.hpp"
#include "microlaser/output.hpp"

using namespace microlaser;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& s) {
    std::istringstream is(s);
    return parse_config(is);
}

const char* kPoint = R"([system]
g_tau = 0.124
gamma_c_tau = 0.049
n_atoms = 100
delta_over_gamma_c = 14.76

[run]
mode = quantum
)";

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse(kPoint);
    CHECK(c.params.g_tau == 0.124);
    CHECK(c.params.delta_tau == doctest::Approx(14.76 * 0.049));
    CHECK(c.mode == Mode::quantum);
    CHECK_FALSE(c.sweep.has_value());

    const auto s = parse(std::string(kPoint) + "\n[sweep]\naxis = delta\nfrom = -10\nto = 10\npoints = 5\n");
    REQUIRE(s.sweep);
    CHECK(s.sweep->values() == std::vector<double>{-10, -5, 0, 5, 10});
    CHECK(s.sweep->apply(s.params, 5.0).delta_tau == doctest::Approx(5.0 * 0.049));

    CHECK_THROWS_AS(parse(std::string(kPoint) + "bogus = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse("[system]\ng_tau = 0.1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse(std::string(kPoint) + "\n[mystery]\nx = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_mode("classical"), InvalidArgument);
    CHECK(parse_number_list("1, 2 3") == std::vector<double>{1, 2, 3});
}

TEST_CASE("oracle mode needs a grid or correlation_only") {
    auto c = parse(kPoint);
    c.mode = Mode::oracle;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.correlation_only = true;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("output formats") {
    OutputSpec o;
    o.set_formats("json,svg");
    CHECK_FALSE(o.csv);
    CHECK(o.json);
    CHECK(o.svg);
    CHECK_THROWS_AS(o.set_formats("csv,xml"), InvalidArgument);
}

TEST_CASE("csv and number formatting") {
    CHECK(io::csv_field("plain") == "plain");
    CHECK(io::csv_field("a,b") == "\"a,b\"");
    CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(std::nan("")) == "nan");
    CHECK(std::stod(io::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("quantum summary round-trips through json") {
    const auto c = parse(kPoint);
    const auto r = run_point(c);
    REQUIRE(r.ok());
    const auto q = io::summarize(*r.state);
    const auto back = io::quantum_summary_from_json(io::json::parse(io::to_json(q).dump()));
    CHECK(back == q);
    const auto j = io::point_json(r);
    CHECK(j.begin().key() == "schema");
    CHECK(j["schema"] == 1);
    CHECK(j["ok"] == true);
}

TEST_CASE("identical configs give byte-identical files") {
    const auto c = parse(std::string(kPoint) + "\n[output]\nformats = csv,json,svg\n");
    const fs::path base = fs::temp_directory_path() / "microlaser_determinism";
    fs::remove_all(base);
    io::write_point(run_point(c), c, base / "a");
    io::write_point(run_point(c), c, base / "b");
    for (const char* f : {"result.json", "spectrum.csv", "spectrum.dat", "spectrum.svg"}) {
        std::ifstream a(base / "a" / f), b(base / "b" / f);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str().size() > 0);
        CHECK(sa.str() == sb.str());
    }
    fs::remove_all(base);
}

TEST_CASE("sweep keeps order with and without warm starts") {
    auto c = parse(std::string(kPoint) + "\n[sweep]\naxis = delta\nfrom = -20\nto = 20\npoints = 9\n");
    c.params.n_atoms = 10;
    const auto warm = run_sweep(c);
    c.cold_start = true;
    const auto cold = run_sweep(c);
    REQUIRE(warm.rows.size() == 9);
    CHECK(warm.warm_started);
    CHECK_FALSE(cold.warm_started);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(warm.rows[i].axis_value == cold.rows[i].axis_value);
        CHECK(warm.rows[i].result.state->dist.mean_n ==
              doctest::Approx(cold.rows[i].result.state->dist.mean_n).epsilon(1e-8));
    }
    std::ostringstream os;
    io::write_sweep_csv(os, warm);
    CHECK(os.str().rfind("delta_per_gamma_c,", 0) == 0);
}

TEST_CASE("compare flags strong coupling disagreement") {
    auto c = parse(kPoint);
    c.mode = Mode::compare;
    c.params = SystemParams::from_gamma_units(0.496, 0.049, 0.5, 0.0);
    const auto r = run_point(c);
    REQUIRE(r.comparison);
    CHECK(r.comparison->exceeds);
}

TEST_CASE("plot data kinds") {
    const fs::path dir = fs::temp_directory_path() / "microlaser_plot";
    fs::remove_all(dir);
    const auto files = io::emit_plotdata("xi", {}, dir, "xi");
    CHECK(files.size() == 2);
    CHECK_THROWS_AS(io::emit_plotdata("histogram", {}, dir, "h"), InvalidArgument);
    CHECK_THROWS_AS(io::emit_plotdata("spectrum", {}, dir, "s"), InvalidArgument);
    fs::remove_all(dir);
}
