#pragma once

#include <map>
#include <string>
#include <vector>

#include "hyperot/dmk.hpp"
#include "hyperot/graph.hpp"

namespace hyperot {

struct TracePoint {
  int t = 0;
  double value = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Time series of one scalar metric. Time indices strictly increase.
struct PropertyTrace {
  std::string name;
  int s = 0;  // 0 for metrics without an s parameter
  double beta = 0.0;
  std::vector<TracePoint> values;

  /// "name" or "name:s"; used as the key in convergence reports.
  std::string key() const;
};

struct ConvergenceReport {
  int t_cost = 0;
  std::map<std::string, int> t_property;
  double p = 1.05;
};

struct AnalysisConfig {
  std::vector<int> s_values{1, 2};
  double threshold_ratio = 1e-4;
  double p = 1.05;

  void validate() const;
};

/// Every metric evaluated at one time step.
struct StepMetrics {
  double cost_total = 0.0;
  double cost_energy = 0.0;
  double cost_structure = 0.0;
  double hyperedges = 0.0;
  double triangles = 0.0;
  double covered_area = 0.0;
  std::vector<double> s_degree;     // aligned with AnalysisConfig::s_values
  std::vector<double> s_closeness;  // aligned with AnalysisConfig::s_values
  double edges = 0.0;
  double degree = 0.0;
  double closeness = 0.0;
};

struct RunAnalysis {
  std::vector<PropertyTrace> traces;
  ConvergenceReport report;

  /// Trace by name and s; throws std::out_of_range if missing.
  const PropertyTrace& trace(const std::string& name, int s = 0) const;
};

/// Trace names, in emission order.
inline constexpr const char* kCostTraces[] = {"cost_total", "cost_energy", "cost_structure"};
inline constexpr const char* kHyperTraces[] = {"hyperedges", "triangles", "covered_area"};
inline constexpr const char* kGraphTraces[] = {"edges", "degree", "closeness"};

/// First time index t with v_t <= p * v_T, T the last index. Throws ConfigError
/// for an empty trace or p < 1.
int convergence_time(const PropertyTrace& trace, double p = 1.05);

/// Graph and hypergraph metrics of a hypergraph lifted from `g`.
StepMetrics evaluate_hypergraph(const SpatialGraph& g, const Hypergraph& h, const AnalysisConfig& cfg);

/// Extracts G(mu_t), H(mu_t) at every step, evaluates all metrics and the
/// convergence times. Extraction errors are rethrown naming the step.
RunAnalysis analyze_run(const Mesh& mesh, const DmkRun& run, double beta, const AnalysisConfig& cfg);

/// Assembles traces from per-step metrics (shared by the solver and image paths).
std::vector<PropertyTrace> build_traces(const std::vector<StepMetrics>& steps, const std::vector<int>& frame_times,
                                        const AnalysisConfig& cfg, double beta, bool include_cost,
                                        bool include_graph);

struct AggregateRow {
  int t = 0;
  double mean = 0.0;
  double std = 0.0;  // population form
  int n = 0;
};

/// Per-time mean and population std across traces aligned by time index.
/// A trace contributes its last value to every index past its end.
std::vector<AggregateRow> aggregate(const std::vector<const PropertyTrace*>& traces);
std::vector<AggregateRow> aggregate(const std::vector<PropertyTrace>& traces);

}  // namespace hyperot
