#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hardcore/errors.hpp"
#include "hardcore/graph.hpp"
#include "hardcore/marginal_recursion.hpp"
#include "hardcore/ode_shooting.hpp"
#include "hardcore/volume.hpp"

namespace py = pybind11;
using namespace hardcore;

namespace {

py::list to_list(std::span<const double> xs) {
  py::list out;
  for (double x : xs) out.append(x);
  return out;
}

py::dict recursion(const std::string& measure, double lam, int delta, std::size_t max_depth, double tol,
                   std::size_t intervals) {
  RecursionOptions opts;
  opts.max_depth = max_depth;
  opts.tol = tol;
  opts.intervals = intervals;
  const auto rep = run_recursion(SpinMeasure::parse(measure, lam), delta, opts);
  py::dict d;
  d["converged"] = rep.converged;
  d["stalled"] = rep.stalled;
  d["depth_reached"] = rep.depth_reached;
  d["gap_sup"] = rep.gap_sup;
  d["C_o"] = rep.C_o;
  d["C_e"] = rep.C_e;
  d["C_gap"] = rep.C_gap;
  d["monotonicity_violations"] = rep.monotonicity_violations;
  d["log_Z"] = rep.log_Z ? py::cast(*rep.log_Z) : py::none();
  d["z"] = to_list(rep.F_odd->grid().points());
  d["F_odd"] = to_list(rep.F_odd->values());
  d["F_even"] = to_list(rep.F_even->values());
  return d;
}

py::dict shooting(int delta, double tol, std::size_t intervals) {
  ShootingOptions opts;
  opts.tol = tol;
  opts.intervals = intervals;
  const auto s = find_Cstar(delta, opts);
  py::dict d;
  d["C_star"] = s.C_star;
  d["tau_star"] = s.tau_star;
  d["bisection_iters"] = s.bisection_iters;
  d["z"] = to_list(s.F->grid().points());
  d["F"] = to_list(s.F->values());
  d["Fdot"] = to_list(s.F->derivative());
  return d;
}

py::dict estimate_dict(const VolumeEstimate& e) {
  py::dict d;
  d["log_Z"] = e.log_Z;
  d["std_err"] = e.std_err;
  d["samples"] = e.samples;
  d["seed"] = e.seed;
  d["method"] = to_string(e.method);
  if (e.refined_log_Z) d["refined_log_Z"] = *e.refined_log_Z;
  if (e.extrapolated_log_Z) d["extrapolated_log_Z"] = *e.extrapolated_log_Z;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Continuous hardcore model: tree recursions, shooting, rewiring and volumes";
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<RewireInvariantError>(m, "RewireInvariantError", PyExc_RuntimeError);

  py::class_<Graph>(m, "Graph")
      .def_static("from_spec", &graph_from_spec, py::arg("spec"))
      .def_static("from_edges",
                  [](int n, const std::vector<Edge>& edges) { return Graph::from_edges(n, edges); },
                  py::arg("n"), py::arg("edges"))
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def("edges", &Graph::edges)
      .def("degree", &Graph::degree)
      .def("girth", [](const Graph& g) { return girth(g); })
      .def("diameter", [](const Graph& g) { return farthest_pair(g).distance; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph n=" + std::to_string(g.size()) + " m=" + std::to_string(g.edge_count()) + ">";
      });

  m.def("run_recursion", &recursion, py::arg("measure") = "continuous", py::arg("lam") = 1.0, py::arg("delta") = 2,
        py::arg("max_depth") = 10000, py::arg("tol") = 1e-8, py::arg("intervals") = kDefaultIntervals);
  m.def("find_cstar", &shooting, py::arg("delta"), py::arg("tol") = 1e-8, py::arg("intervals") = kDefaultIntervals);

  m.def(
      "gamma",
      [](int delta, double lam, const std::string& sign, std::size_t intervals) {
        return gamma_asymptotic(delta, lam, limit_marginal(delta, lam, intervals), parse_sign(sign));
      },
      py::arg("delta"), py::arg("lam") = 1.0, py::arg("sign") = "corrected", py::arg("intervals") = kDefaultIntervals);
  m.def(
      "rewire_ratio",
      [](int delta, double lam, const std::string& sign) {
        return rewire_ratio(delta, lam, limit_marginal(delta, lam), parse_sign(sign));
      },
      py::arg("delta"), py::arg("lam") = 1.0, py::arg("sign") = "corrected");

  m.def(
      "volume_sis",
      [](const Graph& g, const std::string& measure, double lam, long long samples, std::uint64_t seed, int workers) {
        SisOptions opts;
        opts.workers = workers;
        const auto mu = SpinMeasure::parse(measure, lam);
        VolumeEstimate est;
        {
          py::gil_scoped_release release;
          est = mc_volume_sis(g, mu, samples, seed, opts);
        }
        return estimate_dict(est);
      },
      py::arg("graph"), py::arg("measure") = "continuous", py::arg("lam") = 1.0, py::arg("samples") = 100000,
      py::arg("seed") = 42, py::arg("workers") = 0);
  m.def(
      "transfer_cycle_logz",
      [](int n, const std::string& measure, double lam, int bins) {
        return estimate_dict(transfer_cycle_logZ(n, SpinMeasure::parse(measure, lam), bins));
      },
      py::arg("n"), py::arg("measure") = "continuous", py::arg("lam") = 1.0, py::arg("bins") = kDefaultTransferBins);

  m.def(
      "rewire_chain",
      [](const Graph& g, int girth, std::optional<int> min_distance, bool budget) {
        RewireChainOptions opts;
        opts.min_distance = min_distance;
        opts.lemma_budget = budget;
        opts.keep_snapshots = false;
        py::list log;
        for (const auto& s : rewire_chain(RegularGraph(g), girth, opts).log) {
          py::dict d;
          d["step"] = s.step;
          d["n"] = s.n;
          d["girth"] = s.girth;
          d["pair_distance"] = s.pair_distance;
          log.append(d);
        }
        return log;
      },
      py::arg("graph"), py::arg("girth") = 4, py::arg("min_distance") = py::none(), py::arg("budget") = true);
}
