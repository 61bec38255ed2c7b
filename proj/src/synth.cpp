#include "hyperot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hyperot/errors.hpp"

namespace hyperot {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (index + 0x9e3779b97f4a7c15ULL) * 0xbf58476d1ce4e5b9ULL;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below: bound must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::vector<Point2> sink_candidates(int grid_divisions, double radius, Point2 source) {
  if (grid_divisions < 1) throw ConfigError("sample_grid_divisions", "must be >= 1");
  std::vector<Point2> out;
  for (int j = 0; j <= grid_divisions; ++j) {
    for (int i = 0; i <= grid_divisions; ++i) {
      const Point2 p{static_cast<double>(i) / grid_divisions, static_cast<double>(j) / grid_divisions};
      if (distance(p, source) > 2.0 * radius) out.push_back(p);
    }
  }
  return out;
}

ForcingField build_forcing(const Mesh& mesh, const ProblemSpec& spec) {
  const auto& verts = mesh.vertices();
  const auto& w = mesh.vertex_weights();
  std::vector<double> plus(verts.size(), 0.0);
  std::vector<double> minus(verts.size(), 0.0);

  auto stamp = [&](const Point2& c, std::vector<double>& field) {
    int hits = 0;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      if (distance(verts[v], c) <= spec.radius) {
        field[v] += 1.0;
        ++hits;
      }
    }
    if (hits == 0) {
      std::ostringstream msg;
      msg << "circle at (" << c.x << ", " << c.y << ") with radius " << spec.radius << " captures no mesh vertex";
      throw ConfigError("radius", msg.str());
    }
  };
  stamp(spec.source_center, plus);
  for (const auto& c : spec.sink_centers) stamp(c, minus);

  double mass_plus = 0.0;
  double mass_minus = 0.0;
  for (std::size_t v = 0; v < verts.size(); ++v) {
    mass_plus += plus[v] * w[v];
    mass_minus += minus[v] * w[v];
  }

  ForcingField f;
  f.values.resize(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v) {
    f.values[v] = plus[v] / mass_plus - minus[v] / mass_minus;
    if (plus[v] > 0.0) f.source_support.push_back(static_cast<int>(v));
    if (minus[v] > 0.0) f.sink_support.push_back(static_cast<int>(v));
  }
  for (int v : f.source_support) {
    if (minus[v] > 0.0) throw ConfigError("sink_centers", "source and sink supports overlap");
  }
  return f;
}

TransportProblem problem_from_spec(const ProblemSpec& spec, std::shared_ptr<const Mesh> mesh) {
  if (!mesh) throw ConfigError("mesh", "missing");
  if (!(spec.radius > 0.0)) throw ConfigError("radius", "must be positive");
  TransportProblem p;
  p.forcing = build_forcing(*mesh, spec);
  p.mesh = std::move(mesh);
  check_mass_balance(*p.mesh, p.forcing);
  return p;
}

GeneratedProblem generate_problem(std::uint64_t seed, std::shared_ptr<const Mesh> mesh, const ProblemOptions& options) {
  if (!mesh) throw ConfigError("mesh", "missing");
  const int n_div = mesh->n_div();
  const double radius = options.radius > 0.0 ? options.radius : (n_div > 0 ? 1.5 / n_div : 0.0);
  if (!(radius > 0.0)) throw ConfigError("radius", "must be positive");
  const int grid = options.sample_grid_divisions > 0 ? options.sample_grid_divisions : n_div;
  if (options.n_sinks < 1) throw ConfigError("n_sinks", "must be >= 1");

  auto candidates = sink_candidates(grid, radius);
  if (static_cast<std::size_t>(options.n_sinks) > candidates.size()) {
    throw ConfigError("n_sinks", "exceeds the " + std::to_string(candidates.size()) + " available grid nodes");
  }

  // partial Fisher-Yates: first n_sinks slots become the sample
  SeededRng rng(seed);
  for (int i = 0; i < options.n_sinks; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }

  ProblemSpec spec;
  spec.source_center = {0.0, 0.0};
  spec.sink_centers.assign(candidates.begin(), candidates.begin() + options.n_sinks);
  spec.radius = radius;
  spec.seed = seed;
  spec.n_sinks = options.n_sinks;

  TransportProblem problem = problem_from_spec(spec, std::move(mesh));
  return {std::move(spec), std::move(problem)};
}

std::vector<JobSpec> generate_ensemble(int n_problems, const std::vector<double>& betas, std::uint64_t master_seed) {
  if (n_problems < 1) throw ConfigError("n_problems", "must be >= 1");
  if (betas.empty()) throw ConfigError("betas", "must not be empty");
  std::vector<JobSpec> jobs;
  jobs.reserve(static_cast<std::size_t>(n_problems) * betas.size());
  for (int p = 0; p < n_problems; ++p) {
    const std::uint64_t problem_seed = derive_seed(master_seed, static_cast<std::uint64_t>(p));
    for (double beta : betas) {
      JobSpec job;
      job.job_id = static_cast<int>(jobs.size());
      job.problem_index = p;
      job.problem_seed = problem_seed;
      job.job_seed = derive_seed(problem_seed, static_cast<std::uint64_t>(job.job_id) + 1);
      job.beta = beta;
      jobs.push_back(job);
    }
  }
  return jobs;
}

nlohmann::json to_json(const ProblemSpec& spec) {
  nlohmann::json sinks = nlohmann::json::array();
  for (const auto& c : spec.sink_centers) sinks.push_back({c.x, c.y});
  return {{"source_center", {spec.source_center.x, spec.source_center.y}},
          {"sink_centers", std::move(sinks)},
          {"radius", spec.radius},
          {"seed", spec.seed},
          {"n_sinks", spec.n_sinks}};
}

ProblemSpec problem_spec_from_json(const nlohmann::json& j) {
  ProblemSpec spec;
  const auto& s = j.at("source_center");
  spec.source_center = {s.at(0).get<double>(), s.at(1).get<double>()};
  for (const auto& c : j.at("sink_centers")) spec.sink_centers.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  spec.radius = j.at("radius").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.n_sinks = j.at("n_sinks").get<int>();
  return spec;
}

nlohmann::json to_json(const JobSpec& job) {
  return {{"job_id", job.job_id},
          {"problem_index", job.problem_index},
          {"problem_seed", job.problem_seed},
          {"job_seed", job.job_seed},
          {"beta", job.beta}};
}

}  // namespace hyperot
