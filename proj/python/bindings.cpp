// Python bindings: instances, solvers, bounds, validation suites and the
// JSON-config runner.
#include "minimax/abr.hpp"
#include "minimax/baselines.hpp"
#include "minimax/bounds.hpp"
#include "minimax/harness.hpp"
#include "minimax/problems.hpp"
#include "minimax/prox.hpp"
#include "minimax/rhss.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

namespace py = pybind11;
using namespace minimax;

namespace {

struct PySolveResult {
  SolveReport report;
  Vec x() const { return report.final_point.x; }
  Vec y() const { return report.final_point.y; }
};

PySolveResult solve(const QuadraticSaddle& q, const SmoothnessParams& p, const std::string& solver,
                    const Vec& x0, const Vec& y0, double epsilon, const std::string& mode, int k,
                    long max_iterations) {
  const JointPoint z0{x0, y0};
  const Mode md = parse_mode(mode);
  const SolverChoice choice = parse_solver(solver, k);
  const GradientOracle oracle = quadratic_oracle(q);
  py::gil_scoped_release release;
  if (choice.kind == "abr") {
    AbrConfig cfg;
    cfg.epsilon = epsilon / std::sqrt(2.0);
    cfg.params = p;
    return {abr_solve(oracle, z0, cfg)};
  }
  if (choice.kind == "pbr") return {pbr_solve(oracle, z0, epsilon, p, md)};
  if (choice.kind == "rhss") {
    RhssConfig cfg;
    cfg.k = choice.depth;
    cfg.epsilon = epsilon;
    cfg.mode = md;
    return {rhss_solve(q, p, z0, cfg)};
  }
  BaselineConfig cfg;
  cfg.tolerance = certified_gradient_ratio(p, epsilon);
  cfg.max_iterations = max_iterations;
  if (choice.kind == "eg") {
    cfg.algorithm = Baseline::ExtraGradient;
    return {eg_solve(oracle, z0, cfg, p)};
  }
  cfg.algorithm = Baseline::GDA;
  return {gda_solve(oracle, z0, cfg, p)};
}

}  // namespace

PYBIND11_MODULE(_minimax, m) {
  m.doc() = "Strongly-convex-strongly-concave minimax solvers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

  py::class_<SmoothnessParams>(m, "SmoothnessParams")
      .def(py::init([](double m_x, double m_y, double L_x, double L_xy, double L_y) {
             SmoothnessParams p{m_x, m_y, L_x, L_xy, L_y};
             p.validate();
             return p;
           }),
           py::arg("m_x"), py::arg("m_y"), py::arg("L_x"), py::arg("L_xy"), py::arg("L_y"))
      .def_readwrite("m_x", &SmoothnessParams::m_x)
      .def_readwrite("m_y", &SmoothnessParams::m_y)
      .def_readwrite("L_x", &SmoothnessParams::L_x)
      .def_readwrite("L_xy", &SmoothnessParams::L_xy)
      .def_readwrite("L_y", &SmoothnessParams::L_y)
      .def_property_readonly("L", &SmoothnessParams::L)
      .def_property_readonly("kappa_x", &SmoothnessParams::kappa_x)
      .def_property_readonly("kappa_y", &SmoothnessParams::kappa_y)
      .def("__repr__", [](const SmoothnessParams& p) {
        return "SmoothnessParams(m_x=" + std::to_string(p.m_x) + ", m_y=" + std::to_string(p.m_y) +
               ", L_x=" + std::to_string(p.L_x) + ", L_xy=" + std::to_string(p.L_xy) +
               ", L_y=" + std::to_string(p.L_y) + ")";
      });

  py::class_<QuadraticSaddle>(m, "QuadraticSaddle")
      .def_readwrite("A", &QuadraticSaddle::A)
      .def_readwrite("B", &QuadraticSaddle::B)
      .def_readwrite("C", &QuadraticSaddle::C)
      .def_readwrite("u", &QuadraticSaddle::u)
      .def_readwrite("v", &QuadraticSaddle::v)
      .def_property_readonly("n", &QuadraticSaddle::n)
      .def_property_readonly("m", &QuadraticSaddle::m)
      .def("value", [](const QuadraticSaddle& q, const Vec& x, const Vec& y) { return q.value({x, y}); })
      .def("gradient", [](const QuadraticSaddle& q, const Vec& x, const Vec& y) {
        const JointPoint g = quadratic_oracle(q).eval(JointPoint{x, y});
        return py::make_tuple(g.x, g.y);
      });

  m.def(
      "make_quadratic",
      [](Index n, Index mm, const SmoothnessParams& p, std::uint64_t seed, const std::string& spectrum,
         const std::string& coupling) {
        InstanceSpec s;
        s.n = n;
        s.m = mm;
        s.params = p;
        s.seed = seed;
        s.spectrum = parse_spectrum(spectrum);
        s.coupling = parse_coupling(coupling);
        return make_quadratic(s);
      },
      py::arg("n"), py::arg("m"), py::arg("params"), py::arg("seed") = 0,
      py::arg("spectrum") = "Endpoints", py::arg("coupling") = "Random");
  m.def("direct_saddle", [](const QuadraticSaddle& q) {
    const JointPoint z = direct_saddle(q);
    return py::make_tuple(z.x, z.y);
  });
  m.def("duality_gap", [](const QuadraticSaddle& q, const Vec& x, const Vec& y) {
    return duality_gap(q, {x, y});
  });
  m.def("measure_params", &measure_params);

  py::class_<PySolveResult>(m, "SolveResult")
      .def_property_readonly("x", &PySolveResult::x)
      .def_property_readonly("y", &PySolveResult::y)
      .def_property_readonly("outer_iterations", [](const PySolveResult& r) { return r.report.outer_iterations; })
      .def_property_readonly("gradient_evals", [](const PySolveResult& r) { return r.report.gradient_evals; })
      .def_property_readonly("matvec_products", [](const PySolveResult& r) { return r.report.matvec_products; })
      .def_property_readonly("termination", [](const PySolveResult& r) { return to_string(r.report.termination); })
      .def_property_readonly("note", [](const PySolveResult& r) { return r.report.note; })
      .def_property_readonly("residual_history", [](const PySolveResult& r) {
        std::vector<std::pair<std::uint64_t, double>> h;
        for (const auto& s : r.report.residual_history) h.emplace_back(s.eval_count, s.residual);
        return h;
      });

  m.def("solve", &solve, py::arg("q"), py::arg("params"), py::arg("solver"), py::arg("x0"),
        py::arg("y0"), py::arg("epsilon") = 1e-6, py::arg("mode") = "Practical", py::arg("k") = 2,
        py::arg("max_iterations") = 20000000,
        "Run one solver (abr, pbr, rhss, rhss-k<d>, eg, gda) from (x0, y0).");

  m.def("lower_bound", &lower_bound, py::arg("params"), py::arg("epsilon"));
  m.def("pbr_bound", &pbr_bound, py::arg("params"), py::arg("epsilon"));
  m.def("pbr_bound_with_logs", &pbr_bound_with_logs, py::arg("params"), py::arg("epsilon"));
  m.def("linetal_bound", &linetal_bound, py::arg("params"), py::arg("epsilon"));
  m.def("rhss_bound", &rhss_bound, py::arg("params"), py::arg("k"), py::arg("epsilon"));
  m.def("optimal_k", &optimal_k, py::arg("params"), py::arg("C1") = 20.0);
  m.def("contraction_factor", &contraction_factor, py::arg("params"), py::arg("k"));
  m.def("abr_inner_steps", &abr_inner_steps, py::arg("kappa"));
  m.def("cg_iteration_bound", &cg_iteration_bound, py::arg("kappa"), py::arg("epsilon"));

  m.def("validation_suites", &validation_suites);
  m.def(
      "_validate_json",
      [](const std::string& suite, std::uint64_t seed) {
        py::gil_scoped_release release;
        return validate_suite(suite, seed).to_json().dump();
      },
      py::arg("suite"), py::arg("seed") = 0);
  m.def(
      "_run_solve_json",
      [](const std::string& config, bool write) {
        const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config));
        py::gil_scoped_release release;
        const SolveOutput out = run_solve(cfg, write);
        std::string csv = csv_header() + "\n";
        for (const auto& c : out.cells) csv += csv_line(c.row) + "\n";
        return csv;
      },
      py::arg("config"), py::arg("write") = false);
}
