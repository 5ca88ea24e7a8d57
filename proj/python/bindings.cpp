#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covmech/catalog.hpp"
#include "covmech/cli.hpp"
#include "covmech/dynamics.hpp"
#include "covmech/errors.hpp"
#include "covmech/sampling.hpp"

namespace py = pybind11;
using namespace covmech;

namespace {

using OptVec = std::optional<Eigen::VectorXd>;

PhasePoint make_point(const System& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& pi, const OptVec& t) {
  PhasePoint p{x, pi, t.value_or(Eigen::VectorXd::Zero(sys.charge_dim()))};
  sys.hamiltonian.ctx.validate(p);
  return p;
}

py::tuple as_tuple(const PhasePoint& p) { return py::make_tuple(p.x, p.pi, p.t); }

py::dict integrate_py(const System& sys, double span, const OptVec& x, const OptVec& pi, const OptVec& t,
                      const std::string& method, double step, double rel_tol, double abs_tol,
                      const std::vector<std::string>& monitors) {
  PhasePoint p0 = sys.initial;
  if (x) p0.x = *x;
  if (pi) p0.pi = *pi;
  if (t) p0.t = *t;
  sys.hamiltonian.ctx.validate(p0);
  IntegratorConfig cfg;
  cfg.method = integrator_method_from_string(method);
  cfg.step = step;
  cfg.rel_tol = rel_tol;
  cfg.abs_tol = abs_tol;
  cfg.validate();
  const std::vector<std::string> names = monitors.empty() ? sys.constant_names() : monitors;
  std::vector<Observable> obs;
  for (const auto& n : names) obs.push_back(sys.observable(n));

  Trajectory traj;
  {
    py::gil_scoped_release release;
    traj = integrate(sys.hamiltonian, p0, cfg, 0.0, span, obs);
  }
  traj.throw_if_failed();

  const auto n = static_cast<Eigen::Index>(traj.points.size());
  Eigen::MatrixXd xs(n, sys.dim()), ps(n, sys.dim()), ts(n, sys.charge_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& q = traj.points[static_cast<std::size_t>(i)];
    xs.row(i) = q.x.transpose();
    ps.row(i) = q.pi.transpose();
    if (sys.charge_dim() > 0) ts.row(i) = q.t.transpose();
  }
  py::dict drift;
  for (const auto& m : traj.monitors) drift[py::str(m.name)] = m.drift;
  py::dict out;
  out["tau"] = traj.tau;
  out["x"] = xs;
  out["pi"] = ps;
  out["t"] = ts;
  out["drift"] = drift;
  out["status"] = std::string(to_string(traj.status));
  out["message"] = traj.message;
  return out;
}

py::tuple run_command(const std::string& command, const std::string& config_json) {
  const cli::RunConfig cfg = cli::RunConfig::parse(config_json);
  cli::CommandResult res;
  {
    py::gil_scoped_release release;
    if (command == "simulate") {
      res = cli::cmd_simulate(cfg);
    } else if (command == "verify") {
      res = cli::cmd_verify(cfg);
    } else if (command == "bracket-table") {
      res = cli::cmd_bracket_table(cfg);
    } else {
      throw ConfigError("command", "unknown command '" + command + "'");
    }
  }
  return py::make_tuple(res.exit_code, res.report.dump(), res.messages, res.csv);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Covariant phase-space brackets, conserved quantities and orbits for a catalog of backgrounds.";

  auto base = py::register_exception<Error>(m, "CovmechError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<UnknownName>(m, "UnknownName", base.ptr());
  py::register_exception<DetunedParameters>(m, "DetunedParameters", base.ptr());
  py::register_exception<ExtremalParams>(m, "ExtremalParams", base.ptr());
  py::register_exception<OutOfDomain>(m, "OutOfDomain", base.ptr());
  py::register_exception<SingularMetric>(m, "SingularMetric", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<MaxStepsExceeded>(m, "MaxStepsExceeded", base.ptr());
  py::register_exception<NonFiniteState>(m, "NonFiniteState", base.ptr());

  py::class_<System>(m, "System")
      .def_readonly("name", &System::name)
      .def_readonly("params", &System::params)
      .def_readonly("span", &System::span)
      .def_property_readonly("dim", &System::dim)
      .def_property_readonly("charge_dim", &System::charge_dim)
      .def_property_readonly("coordinate_names",
                             [](const System& s) { return s.hamiltonian.ctx.chart.coordinate_names(); })
      .def_property_readonly("constant_names", &System::constant_names)
      .def_property_readonly("closure_pairs", [](const System& s) { return s.closure_pairs; })
      .def_property_readonly("negative_controls",
                             [](const System& s) {
                               std::vector<std::string> out;
                               for (const auto& c : s.negative_controls) out.push_back(c.name);
                               return out;
                             })
      .def_property_readonly("initial", [](const System& s) { return as_tuple(s.initial); })
      .def(
          "evaluate",
          [](const System& s, const std::string& name, const Eigen::VectorXd& x, const Eigen::VectorXd& pi,
             const OptVec& t) { return s.observable(name)(make_point(s, x, pi, t)); },
          py::arg("name"), py::arg("x"), py::arg("pi"), py::arg("t") = py::none())
      .def(
          "bracket",
          [](const System& s, const std::string& a, const std::string& b, const Eigen::VectorXd& x,
             const Eigen::VectorXd& pi, const OptVec& t) {
            return covariant_bracket(s.hamiltonian.ctx, s.observable(a), s.observable(b), make_point(s, x, pi, t));
          },
          py::arg("a"), py::arg("b"), py::arg("x"), py::arg("pi"), py::arg("t") = py::none())
      .def(
          "equations_of_motion",
          [](const System& s, const Eigen::VectorXd& x, const Eigen::VectorXd& pi, const OptVec& t) {
            const PhaseTangent d = equations_of_motion(s.hamiltonian, make_point(s, x, pi, t));
            return py::make_tuple(d.dx, d.dpi, d.dt);
          },
          py::arg("x"), py::arg("pi"), py::arg("t") = py::none())
      .def(
          "sample_points",
          [](const System& s, std::size_t n, std::uint64_t seed) {
            std::vector<py::tuple> out;
            for (const auto& p : sample_points(s, n, seed)) out.push_back(as_tuple(p));
            return out;
          },
          py::arg("n"), py::arg("seed") = 42)
      .def("__repr__", [](const System& s) { return "<covmech.System " + s.name + ">"; });

  m.def("system_names", &system_names);
  m.def("default_params", &default_params, py::arg("system"));
  m.def("build_system", &build_system, py::arg("system"), py::arg("params") = ParamMap{});
  m.def("integrate", &integrate_py, py::arg("system"), py::arg("span"), py::arg("x") = py::none(),
        py::arg("pi") = py::none(), py::arg("t") = py::none(), py::arg("method") = "rk45-adaptive",
        py::arg("step") = 1e-2, py::arg("rel_tol") = 1e-10, py::arg("abs_tol") = 1e-12,
        py::arg("monitors") = std::vector<std::string>{},
        "Integrate from the system's initial point (or the given one); returns arrays and per-monitor drift.");
  m.def("run_command", &run_command, py::arg("command"), py::arg("config_json"),
        "Run simulate, verify or bracket-table on a JSON config; returns (exit_code, report_json, messages, csv).");
}
