#include "hyperot/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hyperot/errors.hpp"
#include "hyperot/extract.hpp"
#include "hyperot/hyper.hpp"

namespace hyperot {

std::string PropertyTrace::key() const {
  return s > 0 ? name + ":" + std::to_string(s) : name;
}

const PropertyTrace& RunAnalysis::trace(const std::string& name, int s) const {
  for (const auto& tr : traces) {
    if (tr.name == name && tr.s == s) return tr;
  }
  throw std::out_of_range("no trace " + name + (s > 0 ? ":" + std::to_string(s) : ""));
}

void AnalysisConfig::validate() const {
  if (s_values.empty()) throw ConfigError("s_values", "must not be empty");
  for (int s : s_values) {
    if (s < 1) throw ConfigError("s_values", "entries must be >= 1");
  }
  if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0)) throw ConfigError("threshold_ratio", "must lie in (0, 1)");
  if (!(p >= 1.0)) throw ConfigError("p", "must be >= 1");
}

int convergence_time(const PropertyTrace& trace, double p) {
  if (trace.values.empty()) throw ConfigError("trace", "empty trace " + trace.key());
  if (!(p >= 1.0)) throw ConfigError("p", "must be >= 1");
  const double band = p * trace.values.back().value;
  for (const auto& pt : trace.values) {
    if (pt.value <= band) return pt.t;
  }
  return trace.values.back().t;  // unreachable for finite values
}

StepMetrics evaluate_hypergraph(const SpatialGraph& g, const Hypergraph& h, const AnalysisConfig& cfg) {
  StepMetrics m;
  m.hyperedges = static_cast<double>(h.hyperedges.size());
  m.triangles = static_cast<double>(h.triangle_count());
  m.covered_area = covered_area(h);
  for (int s : cfg.s_values) {
    const auto hp = hypergraph_properties(h, s);
    m.s_degree.push_back(hp.avg_s_degree);
    m.s_closeness.push_back(hp.avg_s_closeness);
  }
  const auto gp = graph_properties(g);
  m.edges = static_cast<double>(gp.edge_count);
  m.degree = gp.avg_degree;
  m.closeness = gp.avg_closeness;
  return m;
}

std::vector<PropertyTrace> build_traces(const std::vector<StepMetrics>& steps, const std::vector<int>& frame_times,
                                        const AnalysisConfig& cfg, double beta, bool include_cost,
                                        bool include_graph) {
  std::vector<PropertyTrace> traces;
  auto add = [&](const std::string& name, int s, auto getter) {
    PropertyTrace tr{name, s, beta, {}};
    tr.values.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) tr.values.push_back({frame_times[i], getter(steps[i])});
    traces.push_back(std::move(tr));
  };

  if (include_cost) {
    add(kCostTraces[0], 0, [](const StepMetrics& m) { return m.cost_total; });
    add(kCostTraces[1], 0, [](const StepMetrics& m) { return m.cost_energy; });
    add(kCostTraces[2], 0, [](const StepMetrics& m) { return m.cost_structure; });
  }
  add(kHyperTraces[0], 0, [](const StepMetrics& m) { return m.hyperedges; });
  add(kHyperTraces[1], 0, [](const StepMetrics& m) { return m.triangles; });
  add(kHyperTraces[2], 0, [](const StepMetrics& m) { return m.covered_area; });
  for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
    add("s_degree", cfg.s_values[k], [k](const StepMetrics& m) { return m.s_degree[k]; });
  }
  for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
    add("s_closeness", cfg.s_values[k], [k](const StepMetrics& m) { return m.s_closeness[k]; });
  }
  if (include_graph) {
    add(kGraphTraces[0], 0, [](const StepMetrics& m) { return m.edges; });
    add(kGraphTraces[1], 0, [](const StepMetrics& m) { return m.degree; });
    add(kGraphTraces[2], 0, [](const StepMetrics& m) { return m.closeness; });
  }
  return traces;
}

RunAnalysis analyze_run(const Mesh& mesh, const DmkRun& run, double beta, const AnalysisConfig& cfg) {
  cfg.validate();
  if (run.steps.empty()) throw ConfigError("run", "no steps to analyze");

  std::vector<StepMetrics> metrics;
  std::vector<int> times;
  metrics.reserve(run.steps.size());
  for (const auto& step : run.steps) {
    StepMetrics m;
    try {
      const SpatialGraph g = graph_from_field(mesh, step.mu, cfg.threshold_ratio);
      m = evaluate_hypergraph(g, hypergraph_from_graph(g), cfg);
    } catch (const std::exception& e) {
      throw SolverError("extraction failed at step " + std::to_string(step.mu.time_index) + ": " + e.what(),
                        step.mu.time_index);
    }
    m.cost_total = step.cost.total;
    m.cost_energy = step.cost.energy;
    m.cost_structure = step.cost.structure;
    metrics.push_back(std::move(m));
    times.push_back(step.mu.time_index);
  }

  RunAnalysis out;
  out.traces = build_traces(metrics, times, cfg, beta, true, true);
  out.report.p = cfg.p;
  for (const auto& tr : out.traces) {
    if (tr.name == kCostTraces[0]) {
      out.report.t_cost = convergence_time(tr, cfg.p);
    } else if (tr.name != kCostTraces[1] && tr.name != kCostTraces[2]) {
      out.report.t_property[tr.key()] = convergence_time(tr, cfg.p);
    }
  }
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<const PropertyTrace*>& traces) {
  if (traces.empty()) throw ConfigError("traces", "nothing to aggregate");
  int t_min = 0;
  int t_max = 0;
  bool first = true;
  for (const auto* tr : traces) {
    if (tr->values.empty()) throw ConfigError("traces", "empty trace " + tr->key());
    t_min = first ? tr->values.front().t : std::min(t_min, tr->values.front().t);
    t_max = first ? tr->values.back().t : std::max(t_max, tr->values.back().t);
    first = false;
  }

  std::vector<std::size_t> cursor(traces.size(), 0);
  std::vector<AggregateRow> rows;
  rows.reserve(static_cast<std::size_t>(t_max - t_min + 1));
  for (int t = t_min; t <= t_max; ++t) {
    // Welford update over the traces that have started by t
    AggregateRow row{t, 0.0, 0.0, 0};
    double m2 = 0.0;
    for (std::size_t k = 0; k < traces.size(); ++k) {
      const auto& vals = traces[k]->values;
      while (cursor[k] + 1 < vals.size() && vals[cursor[k] + 1].t <= t) ++cursor[k];
      if (vals[cursor[k]].t > t) continue;
      const double x = vals[cursor[k]].value;
      ++row.n;
      const double delta = x - row.mean;
      row.mean += delta / row.n;
      m2 += delta * (x - row.mean);
    }
    if (row.n == 0) continue;
    row.std = std::sqrt(std::max(0.0, m2 / row.n));
    rows.push_back(row);
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<PropertyTrace>& traces) {
  std::vector<const PropertyTrace*> ptrs;
  ptrs.reserve(traces.size());
  for (const auto& tr : traces) ptrs.push_back(&tr);
  return aggregate(ptrs);
}

}  // namespace hyperot
