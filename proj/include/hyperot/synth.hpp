#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperot/dmk.hpp"

namespace hyperot {

/// One source at s0 and M sink circles of common radius.
struct ProblemSpec {
  Point2 source_center;
  std::vector<Point2> sink_centers;
  double radius = 0.0;
  std::uint64_t seed = 0;
  int n_sinks = 0;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct ProblemOptions {
  int n_sinks = 15;
  /// Divisions of the sink sampling grid; 0 means the mesh's own grid.
  int sample_grid_divisions = 0;
  /// Circle radius; 0 means 1.5 / n_div of the mesh.
  double radius = 0.0;
};

struct GeneratedProblem {
  ProblemSpec spec;
  TransportProblem problem;
};

/// SplitMix64 finalizer over (master, index). Used for all derived seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// mt19937_64 with a portable bounded draw. std::uniform_int_distribution is
/// implementation-defined, so sampling uses rejection on raw engine output.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Candidate sink locations: sampling grid nodes farther than 2r from the source.
std::vector<Point2> sink_candidates(int grid_divisions, double radius, Point2 source = {0.0, 0.0});

/// Forcing from circle indicators, each side normalized to unit mass.
/// Throws ConfigError naming the center of any circle that captures no vertex.
ForcingField build_forcing(const Mesh& mesh, const ProblemSpec& spec);

GeneratedProblem generate_problem(std::uint64_t seed, std::shared_ptr<const Mesh> mesh,
                                  const ProblemOptions& options = {});

/// Rebuilds the problem described by a stored spec.
TransportProblem problem_from_spec(const ProblemSpec& spec, std::shared_ptr<const Mesh> mesh);

struct JobSpec {
  int job_id = 0;
  int problem_index = 0;
  std::uint64_t problem_seed = 0;  // shared by every beta of the same problem
  std::uint64_t job_seed = 0;
  double beta = 0.0;
};

/// Problems x betas, problem-major order.
std::vector<JobSpec> generate_ensemble(int n_problems, const std::vector<double>& betas, std::uint64_t master_seed);

nlohmann::json to_json(const ProblemSpec& spec);
ProblemSpec problem_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const JobSpec& job);

}  // namespace hyperot
