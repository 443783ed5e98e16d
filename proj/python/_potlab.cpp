#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "potlab/cli.hpp"
#include "potlab/error.hpp"
#include "potlab/field.hpp"
#include "potlab/solver.hpp"
#include "potlab/verify.hpp"
#include "potlab/wolff.hpp"
#include "potlab/young.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace potlab;

namespace {

// Descriptors cross the boundary as JSON text; the Python layer dumps dicts.
json parse(const std::string& text) { return text.empty() ? json() : json::parse(text); }

Point point(std::pair<double, double> p) { return {p.first, p.second}; }

py::dict field_dict(const VectorField2D& u) {
  const auto& mesh = u.mesh();
  const auto nv = static_cast<py::ssize_t>(mesh.num_vertices());
  const auto m = static_cast<py::ssize_t>(u.components());
  py::array_t<double> xy({nv, py::ssize_t{2}}), values({nv, m});
  auto a = xy.mutable_unchecked<2>();
  auto b = values.mutable_unchecked<2>();
  for (py::ssize_t v = 0; v < nv; ++v) {
    a(v, 0) = mesh.vertices()[v].x;
    a(v, 1) = mesh.vertices()[v].y;
    for (py::ssize_t c = 0; c < m; ++c) b(v, c) = u.at(v)[c];
  }
  py::array_t<int> tri({static_cast<py::ssize_t>(mesh.num_triangles()), py::ssize_t{3}});
  auto t = tri.mutable_unchecked<2>();
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k)
    for (int i = 0; i < 3; ++i) t(k, i) = mesh.triangles()[k][i];
  py::dict d;
  d["vertices"] = xy;
  d["triangles"] = tri;
  d["values"] = values;
  return d;
}

}  // namespace

PYBIND11_MODULE(_potlab, mod) {
  mod.doc() = "Nonlinear potential estimates for measure data problems";

  py::register_exception<ValidationError>(mod, "ValidationError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", PyExc_RuntimeError);

  py::class_<YoungFunction>(mod, "YoungFunction")
      .def_static("power_law", &YoungFunction::power_law, py::arg("p"))
      .def_static("zygmund", &YoungFunction::zygmund, py::arg("p"), py::arg("alpha"))
      .def_static("scaled", &YoungFunction::scaled, py::arg("base"), py::arg("factor"))
      .def_static("from_json", [](const std::string& text) { return YoungFunction::from_json(parse(text)); })
      .def("value", &YoungFunction::value)
      .def("derivative", &YoungFunction::derivative)
      .def("inverse_derivative", &YoungFunction::inverse_derivative)
      .def("conjugate", &YoungFunction::conjugate)
      .def("indices", [](const YoungFunction& G) { return std::make_pair(G.indices().lower, G.indices().upper); })
      .def("to_json", [](const YoungFunction& G) { return G.to_json().dump(); });

  mod.def("young_residual", &young_residual, py::arg("G"), py::arg("t"), py::arg("s"));
  mod.def("double_conjugate", &double_conjugate, py::arg("G"), py::arg("t"));

  mod.def(
      "ball_mass",
      [](const std::string& measure, std::pair<double, double> x0, double r) {
        return MeasureData::from_json(parse(measure)).ball_mass(point(x0), r);
      },
      py::arg("measure"), py::arg("x0"), py::arg("r"));

  mod.def(
      "wolff_potential",
      [](const YoungFunction& G, const std::string& measure, std::pair<double, double> x0, double R) {
        const auto w = wolff_potential(G, MeasureData::from_json(parse(measure)), point(x0), R);
        py::dict d;
        d["value"] = w.value;
        d["divergent"] = w.divergent;
        d["decay_ratio"] = w.decay_ratio;
        d["levels"] = w.levels;
        d["closed_form"] = w.closed_form;
        return d;
      },
      py::arg("G"), py::arg("measure"), py::arg("x0"), py::arg("R"));

  mod.def(
      "radial_reference",
      [](const YoungFunction& G, double mass, double R, const std::vector<double>& radii) {
        RadialReference ref(G, mass, R);
        std::vector<double> out;
        out.reserve(radii.size());
        for (double r : radii) out.push_back(ref(r));
        return out;
      },
      py::arg("G"), py::arg("mass"), py::arg("R"), py::arg("radii"));

  mod.def(
      "monotonicity_bands",
      [](const YoungFunction& G, int m, std::size_t samples, std::uint64_t seed) {
        const auto b = sample_monotonicity({G, CoefficientField::constant(1.0), 2, m}, samples, seed);
        py::dict d;
        d["lhs_over_vgap"] = std::make_pair(b.lhs_over_vgap.min, b.lhs_over_vgap.max);
        d["lhs_over_coercive"] = std::make_pair(b.lhs_over_coercive.min, b.lhs_over_coercive.max);
        d["min_lhs"] = b.min_lhs;
        return d;
      },
      py::arg("G"), py::arg("components") = 1, py::arg("samples") = 10000, py::arg("seed") = 0);

  mod.def(
      "solve",
      [](const std::string& scenario) {
        auto s = cli::parse_scenario(parse(scenario));
        auto mesh = s.domain.mesh(s.resolutions.front());
        std::optional<VectorField2D> boundary;
        if (s.params.contains("boundary"))
          boundary = cli::boundary_field(mesh, s.measure->components(), s.params["boundary"]);
        MeasureData load = *s.measure;
        if (s.params.contains("mollify_h")) {
          const auto [lo, hi] = s.domain.box();
          load = mollify(load, s.params["mollify_h"].get<double>() * s.resolutions.front(), lo, hi);
        }
        std::optional<SolveResult> r;
        {
          py::gil_scoped_release release;
          r = solve_dirichlet(s.operator_spec(), mesh, load, boundary ? &*boundary : nullptr, s.solver);
        }
        py::dict d = field_dict(r->solution());
        py::list stages;
        for (const auto& st : r->stages) {
          py::dict e;
          e["epsilon"] = st.epsilon;
          e["iterations"] = st.iterations;
          e["residual"] = st.residual;
          e["energy"] = st.energy;
          e["converged"] = st.converged;
          stages.append(e);
        }
        d["stages"] = stages;
        return d;
      },
      py::arg("scenario"), "Solve the Dirichlet problem of a scenario descriptor at its first resolution.");

  mod.def(
      "run_scenario",
      [](const std::string& scenario, const std::string& out) {
        auto s = cli::parse_scenario(parse(scenario));
        cli::Outcome o;
        {
          py::gil_scoped_release release;
          o = cli::run_scenario(s, out);
        }
        return o.summary.dump();
      },
      py::arg("scenario"), py::arg("out"));

  mod.def("builtin_scenarios", [] {
    std::vector<std::string> out;
    for (const auto& e : cli::list_builtin_scenarios()) out.push_back(e.descriptor.dump());
    return out;
  });
}
