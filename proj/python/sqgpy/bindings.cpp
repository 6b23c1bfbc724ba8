#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sqg/experiments.hpp"
#include "sqg/local_ops.hpp"
#include "sqg/pseudo.hpp"
#include "sqg/quadrature.hpp"
#include "sqg/spectral.hpp"

namespace py = pybind11;
using namespace sqg;

namespace {

py::array_t<double> to_array(const Grid& g, const std::vector<double>& v) {
  py::array_t<double> out({g.n(), g.n()});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SpectralField from_array(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2 || a.shape(0) != g.n() || a.shape(1) != g.n())
    throw Error(ErrorKind::InvalidGeometry, "array shape must be (n, n)");
  return SpectralField::from_physical(g, std::span<const double>(a.data(), std::size_t(a.size())));
}

py::dict table_dict(const Table& t) {
  py::dict d;
  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    py::list col;
    for (const auto& row : t.rows) {
      try {
        std::size_t used = 0;
        const double v = std::stod(row[j], &used);
        if (used == row[j].size()) {
          col.append(v);
          continue;
        }
      } catch (const std::exception&) {
      }
      col.append(row[j]);
    }
    d[py::str(t.columns[j])] = col;
  }
  return d;
}

py::dict run(const std::string& name, const std::map<std::string, std::string>& settings) {
  Config raw;
  for (const auto& [k, v] : settings) raw.set(k, v);
  const ExperimentConfig c = resolve_config(experiment_from_string(name), raw);
  ExperimentReport r;
  {
    py::gil_scoped_release release;
    r = run_experiment(c);
  }
  py::dict out, tables, summary;
  for (const auto& t : r.tables) tables[py::str(t.name)] = table_dict(t);
  for (const auto& [k, v] : r.summary) summary[py::str(k)] = v;
  out["experiment"] = r.experiment;
  out["config_hash"] = r.config_hash;
  out["tables"] = tables;
  out["summary"] = summary;
  return out;
}

}  // namespace

PYBIND11_MODULE(_sqg, m) {
  m.doc() = "Spectral tools for the dissipative SQG equation";

  py::register_exception<Error>(m, "SqgError", PyExc_RuntimeError);

  m.def("dirichlet_C0", &dirichlet_C0);
  m.def("cos_power_integral", &cos_power_integral, py::arg("alpha"));
  m.def("sin_power_integral", &sin_power_integral, py::arg("alpha"));
  m.def("K_alpha", &K_alpha, py::arg("alpha"));
  m.def("couple_parameters", &couple_parameters, py::arg("alpha"), py::arg("beta"), py::arg("N"));
  m.def("invert_coupling", &invert_coupling, py::arg("alpha"), py::arg("beta"), py::arg("lam"));
  m.def(
      "H_N",
      [](double alpha, double r, double gprime, double N, const std::string& kind) {
        OscillatoryIntegralSpec s;
        s.alpha = alpha;
        s.r = r;
        s.gprime = gprime;
        s.N = N;
        return H_N(s, kind == "diffusion" ? HKind::diffusion : HKind::radial_velocity);
      },
      py::arg("alpha"), py::arg("r"), py::arg("gprime"), py::arg("N"), py::arg("kind") = "diffusion");

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double>(), py::arg("n"), py::arg("L"))
      .def_property_readonly("n", &Grid::n)
      .def_property_readonly("L", &Grid::L)
      .def_property_readonly("dx", &Grid::dx)
      .def("coordinates", [](const Grid& g) {
        py::array_t<double> x(g.n());
        for (int i = 0; i < g.n(); ++i) x.mutable_at(i) = g.x(i);
        return x;
      });

  m.def(
      "fractional_laplacian",
      [](const Grid& g, py::array_t<double> w, double s) {
        return to_array(g, fractional_laplacian(from_array(g, w), s).to_physical());
      },
      py::arg("grid"), py::arg("w"), py::arg("s"));
  m.def(
      "riesz_velocity",
      [](const Grid& g, py::array_t<double> w) {
        const VelocityField v = riesz_velocity(from_array(g, w));
        return py::make_tuple(to_array(g, v.v1.to_physical()), to_array(g, v.v2.to_physical()));
      },
      py::arg("grid"), py::arg("w"));
  m.def(
      "sobolev_norm",
      [](const Grid& g, py::array_t<double> w, double s, bool homogeneous) {
        return sobolev_norm(from_array(g, w), s, homogeneous);
      },
      py::arg("grid"), py::arg("w"), py::arg("s"), py::arg("homogeneous") = true);
  m.def(
      "standard_ansatz",
      [](const Grid& g, int N, double lam) { return to_array(g, sample_ansatz(standard_ansatz(N, lam), g).to_physical()); },
      py::arg("grid"), py::arg("N"), py::arg("lam") = 1.0);

  m.def("run_experiment", &run, py::arg("name"), py::arg("settings") = std::map<std::string, std::string>{},
        "Run an experiment with key = value settings; returns tables and summary.");
  m.def("library_version", &library_version);
}
