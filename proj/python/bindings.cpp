#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fksusc/errors.hpp"
#include "fksusc/oracle.hpp"
#include "fksusc/record_io.hpp"
#include "fksusc/run.hpp"

namespace py = pybind11;
using namespace fksusc;

namespace {

py::array_t<complex> to_array(const std::vector<complex>& v) { return py::array_t<complex>(v.size(), v.data()); }

py::dict series_dict(const IndexedSeries& s) {
  py::dict d;
  d["first"] = s.first;
  d["values"] = to_array(s.values);
  return d;
}

py::dict report_dict(const OracleReport& r) {
  std::vector<int> m;
  std::vector<complex> numeric, analytic;
  std::vector<double> deviation;
  std::vector<bool> edge;
  for (const OracleRow& row : r.rows) {
    m.push_back(row.m);
    numeric.push_back(row.numeric);
    analytic.push_back(row.analytic);
    deviation.push_back(row.deviation);
    edge.push_back(row.edge);
  }
  py::dict d;
  d["ell"] = r.ell;
  d["h_step"] = r.h_step;
  d["tolerance"] = r.tolerance;
  d["m"] = py::array_t<int>(m.size(), m.data());
  d["numeric"] = to_array(numeric);
  d["analytic"] = to_array(analytic);
  d["deviation"] = py::array_t<double>(deviation.size(), deviation.data());
  d["edge"] = edge;
  d["max_deviation"] = r.max_deviation;
  d["max_edge_deviation"] = r.max_edge_deviation;
  d["richardson_ratio"] = r.richardson_ratio;
  d["failing"] = r.failing;
  d["passed"] = r.passed;
  return d;
}

py::dict result_dict(const SusceptibilityResult& r) {
  py::dict routes, errors;
  for (const RouteOutcome& o : r.routes) {
    if (o.value) routes[py::str(std::string(to_string(o.route)))] = *o.value;
    else errors[py::str(std::string(to_string(o.route)))] = o.error;
  }
  py::dict d;
  d["ell"] = r.ell;
  d["n_cut"] = r.n_cut;
  d["routes"] = routes;
  d["errors"] = errors;
  d["max_deviation"] = r.max_deviation;
  d["tail_estimate"] = r.tail_estimate;
  if (r.bse_residual) d["bse_residual"] = *r.bse_residual;
  return d;
}

py::object record_to_py(const RunRecord& record) {
  return py::module_::import("json").attr("loads")(record_to_json(record).dump());
}

RunConfig config_from(const std::string& text, const std::filesystem::path& base_dir) {
  return parse_config_text(text, base_dir);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dynamical charge susceptibility of the Falicov-Kimball model";

  // translators are tried most recent first, so the base class goes first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<StaticComponentError>(m, "StaticComponentError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<MatsubaraGrid>(m, "MatsubaraGrid")
      .def(py::init<double, int>(), py::arg("beta"), py::arg("n_cut"))
      .def_property_readonly("beta", &MatsubaraGrid::beta)
      .def_property_readonly("temperature", &MatsubaraGrid::temperature)
      .def_property_readonly("n_cut", &MatsubaraGrid::n_cut)
      .def_property_readonly("first", &MatsubaraGrid::first)
      .def_property_readonly("last", &MatsubaraGrid::last)
      .def("__len__", &MatsubaraGrid::size)
      .def("fermionic", [](const MatsubaraGrid& g, int m) { return fermionic_frequency(m, g); })
      .def("bosonic", [](const MatsubaraGrid& g, int l) { return bosonic_frequency(l, g); })
      .def("__repr__", [](const MatsubaraGrid& g) {
        return "MatsubaraGrid(beta=" + std::to_string(g.beta()) + ", n_cut=" + std::to_string(g.n_cut()) + ")";
      });

  py::class_<FkParams>(m, "FkParams")
      .def(py::init([](double mu, double U, double w1) {
             FkParams p{mu, U, w1};
             p.validate();
             return p;
           }),
           py::arg("mu"), py::arg("U"), py::arg("w1"))
      .def_readonly("mu", &FkParams::mu)
      .def_readonly("U", &FkParams::U)
      .def_readonly("w1", &FkParams::w1);

  py::class_<BathFunction>(m, "Bath")
      .def("__call__", &BathFunction::at, py::arg("m"))
      .def_property_readonly("kind", [](const BathFunction& b) { return std::string(to_string(b.kind())); })
      .def_property_readonly("coverage", &BathFunction::coverage)
      .def_property_readonly("values", [](const BathFunction& b) {
        return to_array(std::vector<complex>(b.values().begin(), b.values().end()));
      })
      .def("conjugate_symmetry_violation", &BathFunction::conjugate_symmetry_violation);

  m.def("atomic_bath", &atomic_bath, py::arg("grid"));
  m.def("single_level_bath", &single_level_bath, py::arg("grid"), py::arg("V"), py::arg("eps_b"));
  m.def("load_bath", py::overload_cast<const MatsubaraGrid&, const std::filesystem::path&>(&load_bath),
        py::arg("grid"), py::arg("path"));
  m.def("write_bath",
        py::overload_cast<const std::filesystem::path&, const BathFunction&>(&write_bath),
        py::arg("path"), py::arg("bath"));
  m.def(
      "dmft_bethe",
      [](const MatsubaraGrid& grid, const FkParams& params, double t_star, double tol, int max_iter,
         double mixing) {
        DmftResult r = dmft_bethe_loop(grid, params, {t_star, tol, max_iter, mixing});
        return py::make_tuple(r.bath, r.iterations, r.residuals);
      },
      py::arg("grid"), py::arg("params"), py::arg("t_star") = 1.0, py::arg("tol") = 1e-10,
      py::arg("max_iter") = 200, py::arg("mixing") = 0.5,
      "Bethe-lattice self-consistency; returns (bath, iterations, residuals).");

  py::class_<FkEquilibrium>(m, "Equilibrium")
      .def(py::init<const MatsubaraGrid&, BathFunction, const FkParams&>(), py::arg("grid"), py::arg("bath"),
           py::arg("params"))
      .def_property_readonly("grid", &FkEquilibrium::grid)
      .def_property_readonly("green", [](const FkEquilibrium& e) { return to_array(e.g()); })
      .def_property_readonly("sigma", [](const FkEquilibrium& e) { return to_array(e.sigma_values()); })
      .def("green_at", &FkEquilibrium::green, py::arg("m"))
      .def("sigma_at", &FkEquilibrium::sigma, py::arg("m"))
      .def("dyson_violation", &FkEquilibrium::dyson_violation);

  m.def("bare_bubble", [](const FkEquilibrium& e, int ell) { return series_dict(bare_bubble(e, ell).series); },
        py::arg("eq"), py::arg("ell"));
  m.def("vertex", [](const FkEquilibrium& e, int ell) { return series_dict(fk_vertex(e, ell).series); },
        py::arg("eq"), py::arg("ell"));
  m.def("chi_closed_form", &chi_closed_form, py::arg("eq"), py::arg("ell"));
  m.def("chi_direct", &chi_direct, py::arg("eq"), py::arg("ell"));
  m.def("tail_estimate", &tail_estimate, py::arg("grid"), py::arg("ell"));
  m.def(
      "susceptibility",
      [](const FkEquilibrium& e, int ell, const std::vector<std::string>& routes, const std::string& solver) {
        AssembleOptions opt;
        opt.routes.clear();
        for (const std::string& r : routes) {
          const auto route = route_from_string(r);
          if (!route) throw InputError("routes", "unknown route '" + r + "'");
          opt.routes.push_back(*route);
        }
        const auto s = bse_solver_from_string(solver);
        if (!s) throw InputError("bse_solver", "expected dense or diagonal");
        opt.bse_solver = *s;
        return result_dict(assemble(e, ell, opt));
      },
      py::arg("eq"), py::arg("ell"), py::arg("routes") = std::vector<std::string>{"bse", "closed", "direct"},
      py::arg("bse_solver") = "dense");

  m.def(
      "oracle_report",
      [](const MatsubaraGrid& grid, const BathFunction& bath, const FkParams& params, int ell, double h_step,
         double tolerance) { return report_dict(oracle_report(grid, bath, params, ell, h_step, tolerance)); },
      py::arg("grid"), py::arg("bath"), py::arg("params"), py::arg("ell"), py::arg("h_step") = 1e-5,
      py::arg("tolerance") = 1e-6);

  m.def(
      "run",
      [](const std::string& config, const std::filesystem::path& base_dir) {
        RunRecord r;
        {
          py::gil_scoped_release release;
          r = run(config_from(config, base_dir));
        }
        return record_to_py(r);
      },
      py::arg("config"), py::arg("base_dir") = std::filesystem::path{},
      "Runs a JSON configuration and returns the structured record.");
  m.def(
      "sweep",
      [](const std::string& config, int workers, const std::filesystem::path& base_dir) {
        RunRecord r;
        {
          py::gil_scoped_release release;
          r = sweep(config_from(config, base_dir), workers);
        }
        return record_to_py(r);
      },
      py::arg("config"), py::arg("workers") = 1, py::arg("base_dir") = std::filesystem::path{});
  m.def(
      "validate_config",
      [](const std::string& config, const std::filesystem::path& base_dir) {
        return py::module_::import("json").attr("loads")(config_to_json(config_from(config, base_dir)).dump());
      },
      py::arg("config"), py::arg("base_dir") = std::filesystem::path{},
      "Parses and validates a configuration, returning the full echo with defaults.");
}
