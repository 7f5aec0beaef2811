#include <pybind11/eigen.h>
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "reskit/cli.hpp"
#include "reskit/errors.hpp"
#include "reskit/linalg.hpp"
#include "reskit/quantitative.hpp"
#include "reskit/reachability.hpp"
#include "reskit/report.hpp"
#include "reskit/resilience.hpp"
#include "reskit/scenarios.hpp"
#include "reskit/zonotope.hpp"

namespace py = pybind11;
using namespace reskit;

namespace {

LinearSystem make_system(const Matrix& A, const Matrix& B_bar) {
  LinearSystem s;
  s.A = A;
  s.B_bar = B_bar;
  s.validate();
  return s;
}

DocumentHeader header_for(const std::string& command, const LinearSystem& s, const std::vector<int>& lost) {
  DocumentHeader h{command, "custom", {}, lost};
  for (int k : lost) h.lost_labels.push_back(s.actuator_labels[static_cast<std::size_t>(k)]);
  return h;
}

ContainmentMode mode_of(const std::string& m) {
  if (m == "sufficient") return ContainmentMode::sufficient;
  if (m == "exact") return ContainmentMode::exact;
  if (m == "auto" || m == "automatic") return ContainmentMode::automatic;
  throw ArgumentError("mode must be sufficient, exact or auto");
}

// JSON strings are parsed on the Python side.
std::string check_json(const Matrix& A, const Matrix& B_bar, const std::vector<int>& lost) {
  const LinearSystem s = make_system(A, B_bar);
  const ControlSplit sp = split_system(s, lost);
  return check_document(header_for("check", s, sp.lost), analyze_resilience(s, sp)).dump();
}

std::string reach_json(const Matrix& A, const Matrix& B_bar, const std::vector<int>& lost, const Vector& x0,
                       double horizon, int steps, const std::vector<int>& dims) {
  const LinearSystem s = make_system(A, B_bar);
  const ControlSplit sp = split_system(s, lost);
  const ZSet z = compute_z_set(sp);
  if (z.empty()) throw PreconditionError("Z is empty: the lost actuators overpower the remaining ones");
  for (int d : dims)
    if (d < 0 || d >= s.states()) throw ArgumentError("dims out of range");
  return tube_document(header_for("reach", s, sp.lost), reach_tube(s.A, z, x0, horizon, steps), dims).dump();
}

std::string bounds_json(const Matrix& A, const Matrix& B_bar, const std::vector<int>& lost, const Vector& x0,
                        int samples, std::uint64_t seed, int threads) {
  const LinearSystem s = make_system(A, B_bar);
  const ControlSplit sp = split_system(s, lost);
  BoundsOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  opt.threads = threads;
  const BoundsReport r = compute_bounds(s, sp, x0, opt);
  return bounds_document(header_for("bounds", s, sp.lost), r, {seed, samples}, std::nullopt).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Resilience analysis of linear systems under partial loss of actuator authority";

  auto base = py::register_exception<Error>(m, "ResilienceError", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<LookupError>(m, "UnknownNameError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<RankError>(m, "RankError", base.ptr());

  m.def("eigenvalues", [](const Matrix& A) { return eigen_spectrum(A).eigenvalues; }, py::arg("A"));
  m.def("is_hurwitz", &is_hurwitz, py::arg("A"), py::arg("tol") = 1e-9);
  m.def("expm", &matrix_exponential, py::arg("A"), py::arg("t") = 1.0);
  m.def("solve_lyapunov", &solve_lyapunov, py::arg("A"), py::arg("Q"));
  m.def("controllability_rank", &controllability_rank, py::arg("A"), py::arg("M"), py::arg("tol") = 1e-9);

  py::class_<Zonotope>(m, "Zonotope")
      .def(py::init<Vector, Matrix>(), py::arg("center"), py::arg("generators"))
      .def_static("box", &Zonotope::box, py::arg("n"))
      .def_property_readonly("center", &Zonotope::center)
      .def_property_readonly("generators", &Zonotope::generators)
      .def_property_readonly("dim", &Zonotope::dim)
      .def_property_readonly("order", &Zonotope::order)
      .def("support", [](const Zonotope& z, const Vector& d) { return support(z, d); }, py::arg("d"))
      .def("contains_point", [](const Zonotope& z, const Vector& x, double tol) { return contains_point(z, x, tol); },
           py::arg("x"), py::arg("tol") = 1e-9)
      .def("project", [](const Zonotope& z, const std::vector<int>& dims) { return project(z, dims); }, py::arg("dims"))
      .def("vertices", [](const Zonotope& z) { return vertices(z); })
      .def("__repr__", [](const Zonotope& z) {
        std::ostringstream os;
        os << "Zonotope(dim=" << z.dim() << ", order=" << z.order() << ")";
        return os.str();
      });

  m.def("linear_map", &linear_map, py::arg("M"), py::arg("Z"));
  m.def("minkowski_sum", &minkowski_sum, py::arg("A"), py::arg("B"));
  m.def("contains_zonotope",
        [](const Zonotope& outer, const Zonotope& inner, const std::string& mode) {
          return contains_zonotope(outer, inner, mode_of(mode));
        },
        py::arg("outer"), py::arg("inner"), py::arg("mode") = "auto");
  m.def("inner_minkowski_difference",
        [](const Zonotope& Zm, const Zonotope& Zs) -> std::optional<Zonotope> {
          return inner_minkowski_difference(Zm, Zs).set;
        },
        py::arg("Zm"), py::arg("Zs"));

  m.def("z_set",
        [](const Matrix& A, const Matrix& B_bar, const std::vector<int>& lost) -> std::optional<Zonotope> {
          return compute_z_set(split_system(make_system(A, B_bar), lost)).inner;
        },
        py::arg("A"), py::arg("B_bar"), py::arg("lost"));

  m.def("_check_json", &check_json, py::arg("A"), py::arg("B_bar"), py::arg("lost"));
  m.def("_reach_json", &reach_json, py::arg("A"), py::arg("B_bar"), py::arg("lost"), py::arg("x0"),
        py::arg("horizon"), py::arg("steps"), py::arg("dims"));
  m.def("_bounds_json", &bounds_json, py::arg("A"), py::arg("B_bar"), py::arg("lost"), py::arg("x0"),
        py::arg("samples") = 1000, py::arg("seed") = 0, py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("_scenario_json", [](const std::string& name) { return scenario_to_json(load_scenario(name)).dump(); },
        py::arg("name"));
  m.def("list_scenarios", &list_scenarios);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = run_cli(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
