#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "domcode/cftp.hpp"
#include "domcode/disease.hpp"
#include "domcode/domination.hpp"
#include "domcode/errors.hpp"
#include "domcode/graph.hpp"
#include "domcode/ising.hpp"
#include "domcode/percolation.hpp"
#include "domcode/shearer.hpp"

namespace py = pybind11;
using namespace domcode;

namespace {

py::dict report_dict(const BoundReport& rep) {
  py::dict out;
  for (const auto& row : rep.rows) out[py::str(row.name)] = row.value;
  return out;
}

Tri tri_of(int x) {
  if (x < 0 || x > 2) throw ArgumentError("tri values are 0, 1 or 2 (star)");
  return static_cast<Tri>(x);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic domination, dilution and perfect sampling on finite graphs";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<SizeError>(m, "SizeError", base.ptr());
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
  py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());

  py::class_<Graph>(m, "Graph")
      .def(py::init<int, const std::vector<std::pair<int, int>>&, VertexSet>(), py::arg("vertex_count"),
           py::arg("edges"), py::arg("boundary") = VertexSet{})
      .def_static("from_spec", &graph_from_spec, py::arg("spec"))
      .def_property_readonly("size", &Graph::size)
      .def_property_readonly("boundary", &Graph::boundary)
      .def_property_readonly("interior", &Graph::interior)
      .def_property_readonly("max_degree", &Graph::max_degree)
      .def("edges", &Graph::edges)
      .def("neighbors", [](const Graph& g, int v) { return std::vector<int>(g.neighbors(v).begin(), g.neighbors(v).end()); })
      .def("ball", &Graph::ball, py::arg("v"), py::arg("radius"))
      .def("__len__", &Graph::size)
      .def("__repr__", [](const Graph& g) {
        return "<Graph vertices=" + std::to_string(g.size()) + " edges=" + std::to_string(g.edge_count()) + ">";
      });

  m.def("tree_ball", &tree_ball, py::arg("degree"), py::arg("radius"));
  m.def("grid_box", &grid_box, py::arg("dim"), py::arg("side"));
  m.def("cheeger", [](const Graph& g, bool exclude_boundary) {
    auto c = cheeger(g, exclude_boundary);
    return py::make_tuple(c.vertex.value(), c.edge.value());
  }, py::arg("graph"), py::arg("exclude_boundary") = true);

  py::class_<SiteMeasure>(m, "Measure")
      .def_static("from_probabilities",
                  [](VertexSet sites, const std::vector<double>& probs) {
                    return SiteMeasure::from_probabilities(std::move(sites), probs);
                  })
      .def_property_readonly("sites", &SiteMeasure::sites)
      .def("probs", &SiteMeasure::probs)
      .def("prob", &SiteMeasure::prob, py::arg("config"))
      .def("__len__", &SiteMeasure::states);

  m.def("ising_measure", [](const Graph& g, double beta, double field) { return ising_measure(g, uniform_ising(g, beta, field)); },
        py::arg("graph"), py::arg("beta"), py::arg("field") = 0.0);
  m.def("bernoulli_measure", py::overload_cast<const Graph&, double>(&bernoulli_measure), py::arg("graph"), py::arg("p"));
  m.def("total_variation", &total_variation);
  m.def("strassen_dominates", &strassen_dominates, py::arg("upper"), py::arg("lower"), py::arg("flow_tol") = kFlowTol);
  m.def("holley_star", &holley_star);
  m.def("p_star", &p_star);
  m.def("p_of", &p_of, py::arg("measure"), py::arg("tolerance") = 1e-6, py::arg("flow_tol") = kFlowTol);
  m.def("alpha", [](const Graph& g, double beta, double field) { return alpha(g, uniform_ising(g, beta, field)); },
        py::arg("graph"), py::arg("beta"), py::arg("field") = 0.0);

  m.def("ising_bounds",
        [](int delta, double h_e, double beta, double b, double alpha_value, int n_max) {
          return report_dict(ising_bounds(IsingBoundInputs{delta, h_e, beta, b, n_max}, alpha_value));
        },
        py::arg("delta"), py::arg("h_e"), py::arg("beta"), py::arg("b"), py::arg("alpha"), py::arg("n_max") = 10);
  m.def("perc_bounds",
        [](int delta, double h, double p, double q, int k_max) { return report_dict(perc_bounds(delta, h, p, q, k_max)); },
        py::arg("delta"), py::arg("h"), py::arg("p"), py::arg("q"), py::arg("k_max") = 20);
  m.def("infinite_proxy_law", &infinite_proxy_law, py::arg("graph"), py::arg("p"));

  m.def("indep_poly",
        [](int size, const std::vector<std::pair<int, int>>& edges, const std::vector<double>& w) {
          return indep_poly(DependencyGraph(size, edges), w);
        },
        py::arg("size"), py::arg("edges"), py::arg("weights"));
  m.def("shearer_measure",
        [](int size, const std::vector<std::pair<int, int>>& edges, const std::vector<double>& alpha,
           int precision_bits) {
          auto sys = shearer_measure(DependencyGraph(size, edges), alpha, {}, precision_bits);
          std::map<std::uint64_t, double> out;
          for (const auto& e : sys.table()) out[e.set] = sys.prob(e.set);
          return out;
        },
        py::arg("size"), py::arg("edges"), py::arg("alpha"), py::arg("precision_bits") = 0);

  m.def("cftp_diluted_ising",
        [](const Graph& g, double beta, double field, double dilution, std::uint64_t seed, bool localized) {
          DilutedIsingOracle oracle(g, g.interior(), beta, field, dilution);
          auto res = cftp_sample(oracle, UpdateStream(seed), localized ? CftpMode::Localized : CftpMode::Global);
          py::dict out;
          out["sites"] = res.targets;
          std::vector<int> values;
          for (Tri t : res.values) values.push_back(static_cast<int>(t));
          out["values"] = values;
          out["horizon"] = res.horizon;
          return out;
        },
        py::arg("graph"), py::arg("beta"), py::arg("field"), py::arg("dilution"), py::arg("seed"),
        py::arg("localized") = true);
  m.def("refines", [](int a, int b) { return refines(tri_of(a), tri_of(b)); });
  m.def("coding_bound", &coding_bound, py::arg("delta"), py::arg("p"), py::arg("r"));

  m.def("disease_run",
        [](const Graph& g, double p, int r, int n, int v, std::uint64_t seed, bool connected_ones) {
          return static_cast<int>(disease_run(g, p, r, n, v, UpdateStream(seed), connected_ones));
        },
        py::arg("graph"), py::arg("p"), py::arg("r"), py::arg("n"), py::arg("v"), py::arg("seed"),
        py::arg("connected_ones") = false);
  m.def("union_bound", &union_bound, py::arg("delta"), py::arg("p"), py::arg("min_length"));
  m.def("survival_curve",
        [](const Graph& g, int v, double p, const std::vector<int>& radii, long trials, std::uint64_t seed, int jobs) {
          py::list out;
          for (const auto& row : survival_curve(g, v, p, radii, trials, seed, jobs)) {
            py::dict d;
            d["r"] = row.r;
            d["n"] = row.n;
            d["trials"] = row.trials;
            d["survivals"] = row.survivals;
            d["rate"] = row.rate;
            d["wilson_hi"] = row.wilson_hi;
            d["bound"] = row.bound;
            out.append(d);
          }
          return out;
        },
        py::arg("graph"), py::arg("v"), py::arg("p"), py::arg("radii"), py::arg("trials"), py::arg("seed") = 1,
        py::arg("jobs") = 1);
}
