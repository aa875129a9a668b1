#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tsdelay/config.hpp"

namespace py = pybind11;
using namespace tsdelay;

namespace {

struct Problem {
  RunConfig cfg;
  DelayProblem problem;
};

Problem make_problem(const RunConfig& cfg) { return Problem{cfg, build_problem(cfg)}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Delay dynamic equations on time scales";

  static py::exception<Error> error(m, "Error");
  py::register_exception<expr::SyntaxError>(m, "SyntaxError", error.ptr());
  py::register_exception<expr::EvalError>(m, "EvalError", error.ptr());

  py::class_<TimeScale>(m, "TimeScale")
      .def_static("real_interval", &TimeScale::real_interval)
      .def_static("real_line", &TimeScale::real_line)
      .def_static("unit_lattice", &TimeScale::unit_lattice, py::arg("origin") = 0.0)
      .def_static("step_lattice", &TimeScale::step_lattice, py::arg("step"), py::arg("origin") = 0.0)
      .def_static("q_lattice", &TimeScale::q_lattice)
      .def_static("sqrt_naturals", &TimeScale::sqrt_naturals)
      .def_static("finite_grid", &TimeScale::finite_grid)
      .def("contains", &TimeScale::contains)
      .def("sigma", &TimeScale::sigma)
      .def("mu", &TimeScale::mu)
      .def("grid", &TimeScale::grid)
      .def("delta_integral", &TimeScale::delta_integral)
      .def("__repr__", &TimeScale::describe);

  py::class_<expr::Expr>(m, "Expr")
      .def("__call__", &expr::Expr::operator())
      .def_property_readonly("source", &expr::Expr::source)
      .def("__str__", [](const expr::Expr& e) { return expr::format(e); });
  m.def("parse_expr", &expr::parse, py::arg("text"));
  m.def("format_expr", [](const expr::Expr& e) { return expr::format(e); });
  m.def("same_expr", [](const expr::Expr& a, const expr::Expr& b) { return expr::same_tree(a.root(), b.root()); });

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("horizon", &RunConfig::horizon)
      .def_readwrite("real_step", &RunConfig::real_step)
      .def_readwrite("seed", &RunConfig::seed);
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("origin") = "<config>");
  m.def("load_config", &load_config, py::arg("path"));

  m.def(
      "simulate",
      [](const RunConfig& cfg) {
        const Problem p = make_problem(cfg);
        const Trajectory tr = solve(p.problem);
        py::dict out;
        out["t"] = tr.t;
        out["x"] = tr.x;
        out["start"] = tr.start;
        out["residual"] = residual(p.problem, tr);
        out["csv"] = tr.to_csv();
        return out;
      },
      py::arg("config"));

  py::class_<Certificate>(m, "Certificate")
      .def_property_readonly("verdict", [](const Certificate& c) { return std::string(to_string(c.verdict)); })
      .def_readonly("lambda_", &Certificate::lambda)
      .def_readonly("alpha", &Certificate::alpha)
      .def_readonly("D", &Certificate::D)
      .def_readonly("V0", &Certificate::V0)
      .def_property_readonly("certified", &Certificate::certified)
      .def_readonly("lower_bound", &Certificate::lower_bound)
      .def("bound", [](const Certificate& c, double t) { return c.bound ? c.bound(t) : std::nan(""); })
      .def("__str__", &Certificate::to_text);

  m.def(
      "certify",
      [](const RunConfig& cfg, unsigned jobs) {
        SearchGrids s = cfg.search;
        s.jobs = std::max(1u, jobs);
        return certify(make_problem(cfg).problem, s);
      },
      py::arg("config"), py::arg("jobs") = 1);

  m.def(
      "verify_axioms",
      [](const RunConfig& cfg) {
        SampleSpec spec;
        spec.count = cfg.axiom_samples;
        spec.seed = cfg.seed;
        spec.delay_h = cfg.h;
        const AxiomReport r = verify_axioms(build_system(cfg), spec);
        return py::make_tuple(r.all_pass(), r.to_text());
      },
      py::arg("config"));

  m.def(
      "compare",
      [](const RunConfig& cfg) {
        std::optional<double> lam;
        if (!cfg.search.lambdas.empty()) lam = cfg.search.lambdas.front();
        return check_literature_conditions(make_problem(cfg).problem, cfg.compare_N, lam).to_text();
      },
      py::arg("config"));
}
