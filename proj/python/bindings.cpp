#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "app.hpp"
#include "qcrb/qcrb.hpp"

namespace py = pybind11;
using namespace qcrb;

namespace {

py::tuple as_tuple(const FisherMatrix& m) { return py::make_tuple(m.pp, m.mm, m.pm); }

py::object json_module() { return py::module_::import("json"); }

nlohmann::json to_json(const py::dict& d) {
    return nlohmann::json::parse(json_module().attr("dumps")(d).cast<std::string>());
}

py::object from_json(const nlohmann::json& j) { return json_module().attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_qcrb, m) {
    m.doc() = "Quantum Cramer-Rao bounds for two-phase interferometers";
    m.attr("__version__") = kVersion;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<DegenerateStatistics>(m, "DegenerateStatistics", base.ptr());
    py::register_exception<SingularComplement>(m, "SingularComplement", base.ptr());
    py::register_exception<NonpositiveInformation>(m, "NonpositiveInformation", base.ptr());
    py::register_exception<NonFiniteObjective>(m, "NonFiniteObjective", base.ptr());
    py::register_exception<CutoffTooSmall>(m, "CutoffTooSmall", base.ptr());
    py::register_exception<AssumptionViolation>(m, "AssumptionViolation", base.ptr());
    py::register_exception<app::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<Target>(m, "Target")
        .value("PHASE_SUM", Target::PhaseSum)
        .value("PHASE_DIFFERENCE", Target::PhaseDifference);
    py::enum_<Estimation>(m, "Estimation")
        .value("SINGLE", Estimation::SingleParameter)
        .value("TWO", Estimation::TwoParameter);
    py::enum_<GammaDomain>(m, "GammaDomain")
        .value("BOUNDED", GammaDomain::Bounded)
        .value("WHOLE_LINE", GammaDomain::WholeLine);

    py::class_<ModeStatistics>(m, "ModeStatistics")
        .def(py::init<double, double, double, double, double>(), py::arg("mean_a"), py::arg("mean_b"),
             py::arg("var_a"), py::arg("var_b"), py::arg("cov"))
        .def_readwrite("mean_a", &ModeStatistics::mean_a)
        .def_readwrite("mean_b", &ModeStatistics::mean_b)
        .def_readwrite("var_a", &ModeStatistics::var_a)
        .def_readwrite("var_b", &ModeStatistics::var_b)
        .def_readwrite("cov", &ModeStatistics::cov)
        .def("__repr__", [](const ModeStatistics& s) {
            return "ModeStatistics(mean_a=" + std::to_string(s.mean_a) + ", mean_b=" + std::to_string(s.mean_b) +
                   ", var_a=" + std::to_string(s.var_a) + ", var_b=" + std::to_string(s.var_b) +
                   ", cov=" + std::to_string(s.cov) + ")";
        });

    m.def("lbs_moments", [](double alpha, double r, double t) { return lbs_moments({alpha, r, LinearSplitter{t}}); },
          py::arg("alpha"), py::arg("r"), py::arg("transmissivity"));
    m.def("nbs_moments", [](double alpha, double r, double g) { return nbs_moments({alpha, r, NonlinearSplitter{g}}); },
          py::arg("alpha"), py::arg("r"), py::arg("gain"));
    m.def("correlations", [](const ModeStatistics& s) {
        const auto c = derived_correlations(s);
        return py::make_tuple(c.mandel_q_a, c.mandel_q_b, c.correlation_j);
    }, "(Q_a, Q_b, J)");

    m.def("qfim_matrix", [](const ModeStatistics& s) { return as_tuple(qfim_matrix(s)); }, "(f_pp, f_mm, f_pm)");
    m.def("two_param_bound", [](double pp, double mm, double pm, Target t) { return two_param_bound({pp, mm, pm}, t); },
          py::arg("pp"), py::arg("mm"), py::arg("pm"), py::arg("target"));
    m.def("overestimation", [](double pp, double mm, double pm, Target t) { return overestimation({pp, mm, pm}, t); },
          py::arg("pp"), py::arg("mm"), py::arg("pm"), py::arg("target"));
    m.def("qcrb", &qcrb_delta_phi, py::arg("info"), py::arg("repeats") = 1);

    m.def("c_matrix_single",
          [](const ModeStatistics& s, double eta, double gamma) { return as_tuple(c_matrix_single(s, {eta, gamma})); },
          py::arg("stats"), py::arg("eta_a"), py::arg("gamma"));
    m.def("c_matrix_two",
          [](const ModeStatistics& s, double eta_a, double eta_b, double gamma_a, double gamma_b) {
              return as_tuple(c_matrix_two(s, {eta_a, eta_b, gamma_a, gamma_b}));
          },
          py::arg("stats"), py::arg("eta_a"), py::arg("eta_b"), py::arg("gamma_a"), py::arg("gamma_b"));
    m.def("gamma_opt_single", &gamma_opt_single, py::arg("stats"), py::arg("eta_a"), py::arg("target"));
    m.def("optimal_bound_single", &optimal_bound_single, py::arg("stats"), py::arg("eta_a"), py::arg("target"));

    m.def("optimize_gamma_single",
          [](const ModeStatistics& s, double eta, Target t, Estimation mode, GammaDomain domain) {
              const auto r = optimize_gamma(s, SingleArmFamily{eta}, t, {mode, domain, 1e-8});
              return py::make_tuple(r.result.argmin, r.result.minimum);
          },
          py::arg("stats"), py::arg("eta_a"), py::arg("target"), py::arg("mode") = Estimation::TwoParameter,
          py::arg("domain") = GammaDomain::Bounded, "(gamma, bound)");

    m.def("oracle_moments",
          [](double alpha, double r, double splitter, bool nonlinear, int cutoff) {
              const SplitterSpec sp =
                  nonlinear ? SplitterSpec{NonlinearSplitter{splitter}} : SplitterSpec{LinearSplitter{splitter}};
              return measure_moments(oracle_state({alpha, r, sp}, cutoff));
          },
          py::arg("alpha"), py::arg("r"), py::arg("splitter"), py::arg("nonlinear") = false,
          py::arg("cutoff") = kDefaultCutoff, "Moments measured on the truncated Fock state.");

    m.def("run_point",
          [](const py::dict& config) {
              const auto spec = app::parse_spec(to_json(config));
              if (spec.sweep) throw app::ConfigError("run_point does not take a sweep");
              return from_json(app::record_to_json(spec, app::run_point(spec)));
          },
          py::arg("config"), "Evaluate one CLI-style config; returns the record as a dict.");
    m.def("run_scan",
          [](const py::dict& config, int jobs) {
              const auto spec = app::parse_spec(to_json(config));
              std::vector<app::Record> rows;
              {
                  py::gil_scoped_release release;
                  rows = app::run_scan(spec, jobs);
              }
              return app::csv_text(spec, rows);
          },
          py::arg("config"), py::arg("jobs") = 1, "Run a CLI-style sweep; returns the CSV text.");
}
