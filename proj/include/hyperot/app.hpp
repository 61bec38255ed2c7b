#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperot/dmk.hpp"
#include "hyperot/image.hpp"
#include "hyperot/synth.hpp"
#include "hyperot/temporal.hpp"

namespace hyperot {

/// Full run configuration. JSON layout (all sections and keys optional):
///
///   mesh:       {n_div}
///   solver:     {beta, dt, max_iter, tau, mu_floor, linear_tol, mu0}
///   problem:    {seed, n_sinks, radius, sample_grid_divisions}
///   extraction: {threshold_ratio}
///   analysis:   {s_values, p}
///   ensemble:   {n_problems, betas, master_seed}
///   image:      {manifest, intensity_threshold, downsample, permissive, moving_average}
///   output:     {snapshots, hypergraphs: "none" | "final" | "all"}
struct AppConfig {
  int n_div = 32;
  SolverConfig solver;
  double mu0 = 1.0;
  std::uint64_t problem_seed = 0;
  ProblemOptions problem;
  AnalysisConfig analysis;
  int n_problems = 10;
  std::vector<double> betas{1.2, 1.5, 1.8};
  std::uint64_t master_seed = 0;
  std::string image_manifest;
  ImageAnalysisConfig image;
  bool snapshots = true;
  std::string hypergraphs = "final";

  void validate() const;
};

/// Parses and validates a config document. Errors are ConfigError whose field
/// is the JSON pointer of the offending value; when `source` is the original
/// text the message also carries its line number.
AppConfig config_from_json(const nlohmann::json& j, std::string_view source = {});
/// Accepts either a config document or a run manifest (uses its "config").
AppConfig parse_config(std::string_view text);
nlohmann::json to_json(const AppConfig& cfg);

/// 1-based line of the key addressed by `pointer` in `source`, or 0 if not found.
int locate_line(std::string_view source, const std::string& pointer);

struct SolveOutcome {
  DmkRun run;
  RunAnalysis analysis;
  ProblemSpec spec;
};

/// Generates the problem, integrates, analyzes and writes into `out_dir`:
/// manifest.json, problem.json, cost.csv, traces.csv, convergence.json,
/// optional mu.bin snapshots and hypergraph JSONs under hypergraphs/.
SolveOutcome run_solve(const AppConfig& cfg, const std::filesystem::path& out_dir, const std::string& run_id = "run");

struct JobOutcome {
  JobSpec job;
  bool ok = false;
  std::string error;
  RunAnalysis analysis;
  int steps = 0;
  bool converged = false;
};

struct BatchOutcome {
  std::vector<JobOutcome> jobs;
  std::size_t failures() const;
};

/// Runs problems x betas with at most `parallelism` concurrent jobs, one
/// directory per job under out_dir/jobs, then writes aggregate.csv,
/// summary.csv and batch_manifest.json. Output is independent of parallelism.
BatchOutcome run_batch(const AppConfig& cfg, const std::filesystem::path& out_dir, int parallelism);

/// Per-frame hypergraph JSONs, traces.csv, consolidation.json, manifest.json.
ImageSequenceAnalysis run_image(const AppConfig& cfg, const std::filesystem::path& out_dir);

/// Re-runs analytics on a stored solve directory (manifest.json + mu.bin),
/// with extraction/analysis settings taken from `cfg`.
RunAnalysis run_props(const AppConfig& cfg, const std::filesystem::path& run_dir, const std::filesystem::path& out_dir);

/// ProblemSpec for the configured seed and mesh.
ProblemSpec run_gen(const AppConfig& cfg);

}  // namespace hyperot
