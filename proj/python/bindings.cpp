#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "snl/edm.hpp"
#include "snl/experiment.hpp"
#include "snl/landscape.hpp"
#include "snl/theory.hpp"
#include "snl/trust_region.hpp"

namespace py = pybind11;
using namespace snl;

namespace {

Objective masked_from_edges(Index n, const std::vector<std::tuple<Index, Index, double>>& edges) {
  std::vector<Edge> list;
  list.reserve(edges.size());
  for (const auto& [i, j, t] : edges) {
    list.push_back({i, j, t});
  }
  return Objective::masked(MeasurementGraph(n, std::move(list)));
}

py::dict report_dict(const CriticalityReport& r) {
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["grad_norm"] = r.grad_norm;
  d["scale"] = r.scale;
  d["hessian_spectrum"] = r.hessian_spectrum;
  d["symmetry_kernel_dim"] = r.symmetry_kernel_dim;
  d["observed_kernel_dim"] = r.observed_kernel_dim;
  d["min_eig_on_complement"] = r.min_eig_on_complement;
  return d;
}

}  // namespace

PYBIND11_MODULE(_snl, m) {
  m.doc() = "Sensor network localization: objectives, trust-region solver, landscape certificates, sweeps";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<UnsupportedSize>(m, "UnsupportedSize", PyExc_RuntimeError);

  m.def("delta", [](const Matrix& x) { return kernel::delta(x); }, "Delta(X) = (diag(X) 1^T + 1 diag(X)^T) / 2 - X");
  m.def("delta_adjoint", [](const Matrix& d) { return kernel::delta_adjoint(d); }, "Delta*(D) = Diag(D 1) - D");

  py::class_<Objective>(m, "Objective")
      .def_static("complete", [](const Matrix& y) { return Objective::complete(Configuration(y)); }, py::arg("y"))
      .def_static("masked", &masked_from_edges, py::arg("n"), py::arg("edges"),
                  "edges: list of (i, j, target squared distance)")
      .def_property_readonly("scale", &Objective::scale)
      .def_property_readonly("n", &Objective::n)
      .def("cost", &Objective::cost)
      .def("gradient", &Objective::gradient)
      .def("hess_vec", &Objective::hess_vec);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("grad_tol", &SolverOptions::grad_tol)
      .def_readwrite("max_iters", &SolverOptions::max_iters)
      .def_readwrite("initial_radius", &SolverOptions::initial_radius)
      .def_readwrite("max_radius", &SolverOptions::max_radius)
      .def_readwrite("acceptance_threshold", &SolverOptions::acceptance_threshold)
      .def_readwrite("tcg_max_inner", &SolverOptions::tcg_max_inner)
      .def_readwrite("tcg_kappa", &SolverOptions::tcg_kappa)
      .def_readwrite("tcg_theta", &SolverOptions::tcg_theta)
      .def_readwrite("max_consecutive_rejections", &SolverOptions::max_consecutive_rejections)
      .def_readwrite("time_limit_seconds", &SolverOptions::time_limit_seconds);

  m.def(
      "minimize",
      [](const Matrix& z0, const Objective& objective, const SolverOptions& opts) {
        SolveResult r;
        {
          py::gil_scoped_release release;
          r = minimize(Configuration(z0), objective, opts);
        }
        py::dict d;
        d["z"] = r.z_final;
        d["cost"] = r.final_cost;
        d["grad_norm"] = r.final_grad_norm;
        d["iterations"] = r.iterations;
        d["status"] = to_string(r.status);
        return d;
      },
      py::arg("z0"), py::arg("objective"), py::arg("options") = SolverOptions{});

  m.def("preset_names", &preset_names);
  m.def("preset", [](const std::string& name) {
    const Preset p = preset(name);
    py::dict d;
    d["name"] = p.name;
    d["y"] = p.construction.y.points();
    d["z"] = p.construction.z.points();
    d["claimed"] = to_string(p.claimed);
    d["alpha"] = p.construction.alpha;
    d["condition"] = to_string(p.construction.condition);
    return d;
  });
  m.def(
      "certify",
      [](const Matrix& z, const Matrix& y) {
        return report_dict(certify(Configuration(z), Objective::complete(Configuration(y))));
      },
      py::arg("z"), py::arg("y"), "Hessian certificate of Z for the complete objective of Y");

  m.def(
      "check_P1_to_P5",
      [](Index n, int trials, std::uint64_t seed) {
        py::list out;
        for (const auto& r : check_P1_to_P5(n, trials, seed)) {
          py::dict d;
          d["id"] = r.id;
          d["trials"] = r.trials;
          d["max_violation"] = r.max_violation;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("n"), py::arg("trials"), py::arg("seed") = 0);
  m.def("rip_lower_bound", [](Index n) { return rip_lower_bound(n).bound; });
  m.def("sqrtn_threshold", &sqrtn_threshold, py::arg("dg"), py::arg("n"));
  m.def("smallest_gaussian_k", [](const Matrix& y) { return smallest_gaussian_k(Configuration(y)); });

  m.def(
      "sweep_csv",
      [](const std::string& config_json) {
        const SweepSpec spec = parse_sweep_spec(config_json);
        std::vector<TrialRecord> rs;
        {
          py::gil_scoped_release release;
          rs = run_sweep(spec);
        }
        std::ostringstream os;
        write_csv(os, rs);
        return os.str();
      },
      py::arg("config_json"), "Runs a sweep from a JSON config and returns the CSV text");
  m.def(
      "sweep",
      [](const std::string& config_json, const std::string& csv_path) {
        const SweepSpec spec = parse_sweep_spec(config_json);
        py::gil_scoped_release release;
        return sweep(spec, csv_path).size();
      },
      py::arg("config_json"), py::arg("csv_path"), "Runs a sweep and writes the CSV; returns the row count");
}
