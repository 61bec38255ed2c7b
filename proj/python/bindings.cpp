#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hyperot/app.hpp"
#include "hyperot/errors.hpp"
#include "hyperot/extract.hpp"
#include "hyperot/hyper.hpp"
#include "hyperot/io.hpp"

namespace py = pybind11;
using namespace hyperot;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::shared_ptr<const Mesh> shared_mesh(const Mesh& m) { return std::make_shared<const Mesh>(m); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Transport network dynamics and hypergraph analytics";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<PgmError>(m, "PgmError", PyExc_ValueError);

  py::class_<Point2>(m, "Point2")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y)
      .def("__repr__", [](const Point2& p) { return "Point2(" + format_number(p.x) + ", " + format_number(p.y) + ")"; });

  py::class_<Mesh>(m, "Mesh")
      .def(py::init<std::vector<Point2>, std::vector<Triangle>>(), py::arg("vertices"), py::arg("triangles"))
      .def_property_readonly("vertices", &Mesh::vertices)
      .def_property_readonly("triangles", &Mesh::triangles)
      .def_property_readonly("edges", &Mesh::edges)
      .def_property_readonly("triangle_areas", &Mesh::triangle_areas)
      .def_property_readonly("vertex_weights", &Mesh::vertex_weights)
      .def_property_readonly("n_div", &Mesh::n_div)
      .def("total_area", &Mesh::total_area);
  m.def("triangulate_unit_square", &triangulate_unit_square, py::arg("n_div"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("beta", &SolverConfig::beta)
      .def_readwrite("dt", &SolverConfig::dt)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("tau", &SolverConfig::tau)
      .def_readwrite("mu_floor", &SolverConfig::mu_floor)
      .def_readwrite("linear_tol", &SolverConfig::linear_tol)
      .def("validate", &SolverConfig::validate);

  py::class_<ForcingField>(m, "ForcingField")
      .def_readonly("values", &ForcingField::values)
      .def_readonly("source_support", &ForcingField::source_support)
      .def_readonly("sink_support", &ForcingField::sink_support);

  py::class_<TransportProblem>(m, "TransportProblem")
      .def_property_readonly("mesh", [](const TransportProblem& p) { return *p.mesh; })
      .def_readonly("forcing", &TransportProblem::forcing)
      .def_readwrite("mu0", &TransportProblem::mu0);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_readonly("source_center", &ProblemSpec::source_center)
      .def_readonly("sink_centers", &ProblemSpec::sink_centers)
      .def_readonly("radius", &ProblemSpec::radius)
      .def_readonly("seed", &ProblemSpec::seed)
      .def("to_dict", [](const ProblemSpec& s) { return to_py(to_json(s)); });

  m.def(
      "generate_problem",
      [](std::uint64_t seed, const Mesh& mesh, int n_sinks) {
        ProblemOptions opt;
        opt.n_sinks = n_sinks;
        auto gp = generate_problem(seed, shared_mesh(mesh), opt);
        return py::make_tuple(gp.spec, gp.problem);
      },
      py::arg("seed"), py::arg("mesh"), py::arg("n_sinks") = 15,
      "Returns (ProblemSpec, TransportProblem) for a seeded source/sink layout.");

  py::class_<CostBreakdown>(m, "CostBreakdown")
      .def_readonly("total", &CostBreakdown::total)
      .def_readonly("energy", &CostBreakdown::energy)
      .def_readonly("structure", &CostBreakdown::structure);

  py::class_<DmkRun>(m, "DmkRun")
      .def_readonly("converged", &DmkRun::converged)
      .def_readonly("last_update", &DmkRun::last_update)
      .def_property_readonly("n_steps", [](const DmkRun& r) { return r.steps.size(); })
      .def("mu", [](const DmkRun& r, std::size_t t) { return r.steps.at(t).mu.mu; }, py::arg("t"))
      .def("potential", [](const DmkRun& r, std::size_t t) { return r.steps.at(t).u.u; }, py::arg("t"))
      .def_property_readonly("costs", [](const DmkRun& r) {
        std::vector<CostBreakdown> out;
        for (const auto& s : r.steps) out.push_back(s.cost);
        return out;
      });
  m.def("run_dmk", &run_dmk, py::arg("problem"), py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<SpatialGraph>(m, "SpatialGraph")
      .def_property_readonly("nodes", [](const SpatialGraph& g) {
        std::vector<int> ids;
        for (const auto& n : g.nodes) ids.push_back(n.id);
        return ids;
      })
      .def_readonly("edges", &SpatialGraph::edges);

  py::class_<Hypergraph>(m, "Hypergraph")
      .def_property_readonly("hyperedges", [](const Hypergraph& h) {
        std::vector<std::vector<int>> out;
        for (const auto& e : h.hyperedges) out.emplace_back(e.ids().begin(), e.ids().end());
        return out;
      })
      .def_property_readonly("n_nodes", [](const Hypergraph& h) { return h.nodes.size(); })
      .def("triangle_count", &Hypergraph::triangle_count)
      .def("to_dict", [](const Hypergraph& h) { return to_py(to_json(h)); });

  m.def(
      "graph_from_field",
      [](const Mesh& mesh, std::vector<double> mu, double ratio) { return graph_from_field(mesh, {std::move(mu), 0}, ratio); },
      py::arg("mesh"), py::arg("mu"), py::arg("threshold_ratio") = AnalysisConfig{}.threshold_ratio);
  m.def("hypergraph_from_graph", &hypergraph_from_graph, py::arg("graph"));
  m.def("skeleton", &skeleton, py::arg("hypergraph"));

  py::class_<HypergraphProperties>(m, "HypergraphProperties")
      .def_readonly("hyperedge_count", &HypergraphProperties::hyperedge_count)
      .def_readonly("triangle_count", &HypergraphProperties::triangle_count)
      .def_readonly("covered_area", &HypergraphProperties::covered_area)
      .def_readonly("avg_s_degree", &HypergraphProperties::avg_s_degree)
      .def_readonly("avg_s_closeness", &HypergraphProperties::avg_s_closeness);
  m.def("hypergraph_properties", &hypergraph_properties, py::arg("hypergraph"), py::arg("s") = 1);
  m.def("covered_area", &covered_area, py::arg("hypergraph"));

  m.def(
      "convergence_time",
      [](const std::vector<double>& values, double p) {
        PropertyTrace tr;
        for (std::size_t i = 0; i < values.size(); ++i) tr.values.push_back({static_cast<int>(i), values[i]});
        return convergence_time(tr, p);
      },
      py::arg("values"), py::arg("p") = 1.05);

  m.def(
      "analyze_run",
      [](const Mesh& mesh, const DmkRun& run, double beta, double threshold_ratio, double p) {
        AnalysisConfig cfg;
        cfg.threshold_ratio = threshold_ratio;
        cfg.p = p;
        const auto a = analyze_run(mesh, run, beta, cfg);
        py::dict traces;
        for (const auto& tr : a.traces) {
          std::vector<double> v;
          for (const auto& pt : tr.values) v.push_back(pt.value);
          traces[py::str(tr.key())] = v;
        }
        return py::make_tuple(traces, to_py(to_json(a.report)));
      },
      py::arg("mesh"), py::arg("run"), py::arg("beta"), py::arg("threshold_ratio") = AnalysisConfig{}.threshold_ratio,
      py::arg("p") = 1.05, "Returns (traces by key, convergence report dict).");

  m.def(
      "run_solve",
      [](const py::object& config, const std::filesystem::path& out_dir) {
        const auto cfg = config_from_json(from_py(config));
        py::gil_scoped_release release;
        return run_solve(cfg, out_dir).analysis.report.t_cost;
      },
      py::arg("config"), py::arg("out_dir"), "Solve from a config dict; writes the run directory, returns t_cost.");
  m.def(
      "run_batch",
      [](const py::object& config, const std::filesystem::path& out_dir, int parallelism) {
        const auto cfg = config_from_json(from_py(config));
        py::gil_scoped_release release;
        return run_batch(cfg, out_dir, parallelism).failures();
      },
      py::arg("config"), py::arg("out_dir"), py::arg("parallelism") = 1, "Returns the number of failed jobs.");
  m.def(
      "default_config", [] { return to_py(to_json(AppConfig{})); }, "The full default configuration as a dict.");
}
