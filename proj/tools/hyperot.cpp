// hyperot: solve transport problems, run ensembles, analyze image sequences.
//
// Exit codes: 0 ok, 2 config error, 3 solver failure, 4 I/O failure,
// 5 batch finished with failed jobs.

#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hyperot/app.hpp"
#include "hyperot/errors.hpp"
#include "hyperot/io.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kSolver = 3, kIo = 4, kBatchFailed = 5 };

struct Overrides {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_div;
  std::optional<double> beta;
  std::optional<double> dt;
  std::optional<int> max_iter;
  std::optional<double> tau;
  std::optional<double> threshold_ratio;
  std::optional<double> p;
  std::optional<int> n_problems;
  std::vector<double> betas;
  std::optional<std::string> manifest;
  std::optional<double> intensity_threshold;
  std::optional<int> downsample;
  bool permissive = false;
  std::optional<bool> snapshots;
  std::optional<std::string> hypergraphs;

  hyperot::AppConfig load(bool seed_is_master) const {
    hyperot::AppConfig c;
    if (!config.empty()) c = hyperot::parse_config(hyperot::read_file(config));
    if (seed) (seed_is_master ? c.master_seed : c.problem_seed) = *seed;
    if (n_div) c.n_div = *n_div;
    if (beta) c.solver.beta = *beta;
    if (dt) c.solver.dt = *dt;
    if (max_iter) c.solver.max_iter = *max_iter;
    if (tau) c.solver.tau = *tau;
    if (threshold_ratio) c.analysis.threshold_ratio = *threshold_ratio;
    if (p) c.analysis.p = *p;
    if (n_problems) c.n_problems = *n_problems;
    if (!betas.empty()) c.betas = betas;
    if (manifest) c.image_manifest = *manifest;
    if (intensity_threshold) c.image.intensity_threshold = *intensity_threshold;
    if (downsample) c.image.downsample = *downsample;
    if (permissive) c.image.permissive = true;
    if (snapshots) c.snapshots = *snapshots;
    if (hypergraphs) c.hypergraphs = *hypergraphs;
    c.validate();
    return c;
  }
};

void add_common(CLI::App* cmd, Overrides& o, bool needs_out) {
  cmd->add_option("-c,--config", o.config, "JSON config file (or a run manifest)")->check(CLI::ExistingFile);
  auto* out = cmd->add_option("-o,--out", o.out, "output directory");
  if (needs_out) out->required();
  cmd->add_option("--seed", o.seed, "problem seed (solve, gen) or master seed (batch)");
  cmd->add_option("--threshold-ratio", o.threshold_ratio, "extraction threshold as a fraction of max conductivity");
  cmd->add_option("--p", o.p, "convergence tolerance factor, > 1");
  cmd->add_option("--hypergraphs", o.hypergraphs, "hypergraph JSON output: none, final or all");
}

void add_solver(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--n-div", o.n_div, "mesh divisions per side");
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap");
  cmd->add_option("--tau", o.tau, "stopping threshold on max |mu update|");
  cmd->add_option("--snapshots", o.snapshots, "write conductivity snapshots (mu.bin)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transport network dynamics and hypergraph analytics"};
  app.require_subcommand(1);
  Overrides o;
  int parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string run_dir;

  auto* solve = app.add_subcommand("solve", "solve one problem and analyze its trajectory");
  add_common(solve, o, true);
  add_solver(solve, o);
  solve->add_option("--beta", o.beta, "transport exponent in (1, 2)");

  auto* batch = app.add_subcommand("batch", "run problems x betas and aggregate");
  add_common(batch, o, true);
  add_solver(batch, o);
  batch->add_option("--n-problems", o.n_problems, "number of seeded problems");
  batch->add_option("--betas", o.betas, "transport exponents")->delimiter(',');
  batch->add_option("--parallelism", parallelism, "concurrent jobs (default: hardware threads)")
      ->check(CLI::PositiveNumber);

  auto* image = app.add_subcommand("image", "analyze a PGM frame sequence");
  add_common(image, o, true);
  image->add_option("--manifest", o.manifest, "image manifest JSON");
  image->add_option("--intensity-threshold", o.intensity_threshold, "block-mean intensity threshold");
  image->add_option("--downsample", o.downsample, "block size in pixels");
  image->add_flag("--permissive", o.permissive, "skip unreadable frames instead of failing");

  auto* props = app.add_subcommand("props", "re-run analytics on a stored solve directory");
  add_common(props, o, true);
  props->add_option("run_dir", run_dir, "directory written by solve")->required()->check(CLI::ExistingDirectory);

  auto* gen = app.add_subcommand("gen", "print the generated problem as JSON");
  add_common(gen, o, false);
  gen->add_option("--n-div", o.n_div, "mesh divisions per side");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (solve->parsed()) {
      const auto cfg = o.load(false);
      const auto r = hyperot::run_solve(cfg, o.out);
      std::cout << "steps " << r.run.steps.size() - 1 << (r.run.converged ? " converged" : " (max_iter reached)")
                << ", t_cost " << r.analysis.report.t_cost << "\n";
    } else if (batch->parsed()) {
      const auto cfg = o.load(true);
      const auto r = hyperot::run_batch(cfg, o.out, parallelism);
      std::cout << r.jobs.size() << " jobs, " << r.failures() << " failed\n";
      for (const auto& j : r.jobs) {
        if (!j.ok) std::cerr << "job " << j.job.job_id << ": " << j.error << "\n";
      }
      if (r.failures() > 0) return kBatchFailed;
    } else if (image->parsed()) {
      const auto cfg = o.load(false);
      const auto r = hyperot::run_image(cfg, o.out);
      for (const auto& e : r.errors) std::cerr << "frame " << e.frame << " skipped: " << e.message << "\n";
      std::cout << r.frames.size() << " frames";
      if (r.consolidation.found) {
        std::cout << ", consolidation window [" << r.consolidation.start << ", " << r.consolidation.end << "]";
      }
      std::cout << "\n";
    } else if (props->parsed()) {
      const auto cfg = o.load(false);
      hyperot::run_props(cfg, run_dir, o.out);
    } else if (gen->parsed()) {
      const auto cfg = o.load(false);
      const auto spec = hyperot::run_gen(cfg);
      const std::string text = hyperot::dump_json(hyperot::to_json(spec));
      if (o.out.empty()) {
        std::cout << text;
      } else {
        hyperot::write_file(std::filesystem::path(o.out) / "problem.json", text);
      }
    }
  } catch (const hyperot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const hyperot::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const hyperot::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const hyperot::PgmError& e) {
    std::cerr << "image error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
