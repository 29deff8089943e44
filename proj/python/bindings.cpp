#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "microlaser/config.hpp"
#include "microlaser/errors.hpp"
#include "microlaser/kernel.hpp"
#include "microlaser/oracle.hpp"
#include "microlaser/output.hpp"
#include "microlaser/runner.hpp"
#include "microlaser/semiclassical.hpp"
#include "microlaser/spectrum.hpp"
#include "microlaser/steady_state.hpp"

namespace py = pybind11;
using namespace microlaser;
namespace sc = microlaser::semiclassical;

namespace {

std::optional<GridSpec> grid_from(std::optional<std::tuple<double, double, int>> g) {
    if (!g) return std::nullopt;
    return GridSpec{std::get<0>(*g), std::get<1>(*g), std::get<2>(*g)};
}

}  // namespace

PYBIND11_MODULE(_microlaser, m) {
    m.doc() = "Microlaser steady state, frequency pulling and spectrum";

    // Translators run newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double g_tau, double gamma_c_tau, double n_atoms, double delta_tau) {
                 SystemParams p{g_tau, gamma_c_tau, n_atoms, delta_tau};
                 p.validate();
                 return p;
             }),
             py::arg("g_tau"), py::arg("gamma_c_tau"), py::arg("n_atoms"), py::arg("delta_tau") = 0.0)
        .def_static("from_gamma_units", &SystemParams::from_gamma_units, py::arg("g_tau"), py::arg("gamma_c_tau"),
                    py::arg("n_atoms"), py::arg("delta_over_gamma_c"))
        .def_readwrite("g_tau", &SystemParams::g_tau)
        .def_readwrite("gamma_c_tau", &SystemParams::gamma_c_tau)
        .def_readwrite("n_atoms", &SystemParams::n_atoms)
        .def_readwrite("delta_tau", &SystemParams::delta_tau)
        .def_property_readonly("delta_over_gamma_c", &SystemParams::delta_over_gamma_c)
        .def_property_readonly("threshold_atoms", &SystemParams::threshold_atoms)
        .def_property_readonly("pump_theta_sq", &SystemParams::pump_theta_sq)
        .def_property_readonly("n_ex", &SystemParams::n_ex)
        .def("__repr__", &SystemParams::describe);

    m.def("xi", &kernel::xi, py::arg("phi"));
    m.def(
        "mu_exact", [](int n, const SystemParams& p, double dp) { return kernel::mu_exact(n, p, EffectiveDetuning(dp)); },
        py::arg("n"), py::arg("params"), py::arg("delta_prime_tau"));
    m.def(
        "emission_probability",
        [](int n, const SystemParams& p, double dp) { return kernel::emission_probability(n, p, EffectiveDetuning(dp)); },
        py::arg("n"), py::arg("params"), py::arg("delta_prime_tau"));

    py::class_<SteadyState>(m, "SteadyState")
        .def_readonly("params", &SteadyState::params)
        .def_property_readonly("delta_prime_tau", [](const SteadyState& s) { return s.delta_prime.value(); })
        .def_property_readonly("p", [](const SteadyState& s) { return s.dist.p; })
        .def_property_readonly("mean_n", [](const SteadyState& s) { return s.dist.mean_n; })
        .def_property_readonly("mandel_q", [](const SteadyState& s) { return s.dist.mandel_q; })
        .def_property_readonly("n_max", [](const SteadyState& s) { return s.dist.n_max; })
        .def_readonly("mean_pulling", &SteadyState::mean_pulling)
        .def_readonly("pulling_std", &SteadyState::pulling_std)
        .def_readonly("mean_diffusion", &SteadyState::mean_diffusion)
        .def_readonly("residual", &SteadyState::residual)
        .def_readonly("iterations", &SteadyState::iterations)
        .def_readonly("converged", &SteadyState::converged)
        .def_readonly("method", &SteadyState::method)
        .def_readonly("warnings", &SteadyState::warnings)
        .def("weights", &SteadyState::weights)
        .def("summary", [](const SteadyState& s) { return io::to_json(io::summarize(s)).dump(); });

    m.def(
        "solve",
        [](const SystemParams& p, double tolerance, double damping, std::optional<double> initial) {
            SteadyStateOptions o;
            o.tolerance = tolerance;
            o.damping = damping;
            o.initial_delta_prime = initial;
            return self_consistent_detuning(p, o);
        },
        py::arg("params"), py::arg("tolerance") = 1e-10, py::arg("damping") = 0.5,
        py::arg("initial_delta_prime_tau") = py::none(), py::call_guard<py::gil_scoped_release>());

    py::class_<Peak>(m, "Peak")
        .def_readonly("center", &Peak::center)
        .def_readonly("height", &Peak::height)
        .def_readonly("hwhm", &Peak::hwhm)
        .def_readonly("area_share", &Peak::area_share);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("grid", &Spectrum::grid)
        .def_readonly("density", &Spectrum::density)
        .def_readonly("raw_density", &Spectrum::raw_density)
        .def_readonly("peaks", &Spectrum::peaks)
        .def_readonly("warnings", &Spectrum::warnings);

    m.def(
        "build_spectrum",
        [](const SteadyState& s, std::optional<std::tuple<double, double, int>> grid) {
            return build_spectrum(s, grid_from(grid));
        },
        py::arg("state"), py::arg("grid") = py::none(), "grid is (min, max, points) in units of gamma_c");
    m.def("correlation_g1", &correlation_g1, py::arg("state"), py::arg("t_tau"));

    py::class_<sc::Branch>(m, "Branch")
        .def_readonly("n", &sc::Branch::n)
        .def_readonly("delta_tau", &sc::Branch::delta_tau)
        .def_readonly("branch_index", &sc::Branch::branch_index)
        .def_readonly("stable", &sc::Branch::stable);
    m.def(
        "solve_branches", [](const SystemParams& p) { return sc::solve_branches(p).branches; }, py::arg("params"));

    m.def(
        "validate",
        [](const SteadyState& s) {
            const auto r = oracle::validate_state(s);
            return io::validation_json(r).dump();
        },
        py::arg("state"), py::call_guard<py::gil_scoped_release>(), "Oracle comparison report as a JSON string");

    m.def(
        "run_config",
        [](const std::string& path) {
            const auto cfg = load_config(path);
            cfg.validate();
            if (cfg.sweep) return io::sweep_json(run_sweep(cfg)).dump();
            return io::point_json(run_point(cfg)).dump();
        },
        py::arg("path"), py::call_guard<py::gil_scoped_release>(), "Runs an INI config; returns the result JSON string");
}
