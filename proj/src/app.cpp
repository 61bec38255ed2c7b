#include "hyperot/app.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <set>
#include <thread>

#include "hyperot/errors.hpp"
#include "hyperot/extract.hpp"
#include "hyperot/io.hpp"

namespace hyperot {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Strict reader: every key must be known, every value must have the right type.
class ConfigReader {
 public:
  ConfigReader(const json& root, std::string_view source) : root_(root), source_(source) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    const int line = source_.empty() ? 0 : locate_line(source_, pointer);
    throw ConfigError(pointer, line > 0 ? what + " (line " + std::to_string(line) + ")" : what);
  }

  const json* section(const std::string& name, const std::set<std::string>& keys) const {
    if (!root_.contains(name)) return nullptr;
    const json& s = root_.at(name);
    if (!s.is_object()) fail("/" + name, "section must be an object");
    for (const auto& [k, _] : s.items()) {
      if (!keys.count(k)) fail("/" + name + "/" + k, "unknown key");
    }
    return &s;
  }

  template <typename T>
  void read(const json* sec, const std::string& name, const std::string& key, T& out) const {
    if (!sec || !sec->contains(key)) return;
    const json& v = sec->at(key);
    const std::string ptr = "/" + name + "/" + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(ptr, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(ptr, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(ptr, "expected an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
        fail(ptr, "expected a non-negative integer");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(ptr, "expected a number");
    } else {
      if (!v.is_array()) fail(ptr, "expected an array");
      for (const auto& e : v) {
        if (!e.is_number()) fail(ptr, "expected an array of numbers");
        if (std::is_integral_v<typename T::value_type> && !e.is_number_integer()) fail(ptr, "expected integers");
      }
    }
    out = v.get<T>();
  }

  // Re-throws a ConfigError from validate() with the pointer and line of its field.
  void validation_failed(const ConfigError& e, const std::string& section) const {
    const std::string msg = e.what();
    const auto colon = msg.find(": ");
    fail("/" + section + "/" + e.field(), colon == std::string::npos ? msg : msg.substr(colon + 2));
  }

 private:
  const json& root_;
  std::string_view source_;
};

std::string step_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%04d.json", t);
  return buf;
}

std::string frame_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04d.json", t);
  return buf;
}

std::string job_name(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "job_%04d", id);
  return buf;
}

// Writes and records the content hash of one artifact.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, std::string_view contents) {
    write_file(root_ / rel, contents);
    hashes_[rel] = content_hash(contents);
  }
  const json& hashes() const { return hashes_; }
  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  json hashes_ = json::object();
};

SolveOutcome solve_into(const AppConfig& cfg, std::shared_ptr<const Mesh> mesh, const fs::path& out_dir,
                        const std::string& run_id, const json* job) {
  GeneratedProblem gp = generate_problem(cfg.problem_seed, mesh, cfg.problem);
  gp.problem.mu0 = cfg.mu0;

  SolveOutcome outcome;
  outcome.spec = gp.spec;
  outcome.run = run_dmk(gp.problem, cfg.solver);
  outcome.analysis = analyze_run(*mesh, outcome.run, cfg.solver.beta, cfg.analysis);

  ArtifactWriter w(out_dir);
  const json problem_json = to_json(gp.spec);
  const std::string problem_text = dump_json(problem_json);
  w.write("problem.json", problem_text);

  std::string cost = "t,total,energy,structure\n";
  json cost_rows = json::array();
  for (const auto& s : outcome.run.steps) {
    cost += std::to_string(s.mu.time_index) + "," + format_number(s.cost.total) + "," + format_number(s.cost.energy) +
            "," + format_number(s.cost.structure) + "\n";
    cost_rows.push_back({{"t", s.mu.time_index},
                         {"total", s.cost.total},
                         {"energy", s.cost.energy},
                         {"structure", s.cost.structure}});
  }
  w.write("cost.csv", cost);
  w.write("traces.csv", trace_csv(outcome.analysis.traces, run_id));
  w.write("convergence.json", dump_json(to_json(outcome.analysis.report)));

  if (cfg.snapshots) {
    std::vector<ConductivityField> fields;
    fields.reserve(outcome.run.steps.size());
    for (const auto& s : outcome.run.steps) fields.push_back(s.mu);
    w.write("mu.bin", encode_snapshots(fields));
  }

  if (cfg.hypergraphs != "none") {
    const std::size_t first = cfg.hypergraphs == "all" ? 0 : outcome.run.steps.size() - 1;
    for (std::size_t i = first; i < outcome.run.steps.size(); ++i) {
      const auto& mu = outcome.run.steps[i].mu;
      const Hypergraph h = hypergraph_from_graph(graph_from_field(*mesh, mu, cfg.analysis.threshold_ratio));
      w.write("hypergraphs/" + step_name(mu.time_index), dump_json(to_json(h)));
    }
  }

  json manifest = {
      {"kind", "solve"},
      {"run_id", run_id},
      {"config", to_json(cfg)},
      {"problem", problem_json},
      {"problem_hash", content_hash(problem_text)},
      {"run",
       {{"steps", static_cast<int>(outcome.run.steps.size()) - 1},
        {"converged", outcome.run.converged},
        {"last_update", outcome.run.last_update}}},
      {"cost", std::move(cost_rows)},
      {"artifacts", w.hashes()},
  };
  if (job) manifest["job"] = *job;
  write_file(out_dir / "manifest.json", dump_json(manifest));
  return outcome;
}

}  // namespace

int locate_line(std::string_view source, const std::string& pointer) {
  std::size_t pos = 0;
  std::size_t start = 1;
  while (start <= pointer.size()) {
    const std::size_t end = pointer.find('/', start);
    const std::string token = pointer.substr(start, end == std::string::npos ? std::string::npos : end - start);
    const std::string quoted = "\"" + token + "\"";
    std::size_t found = std::string::npos;
    for (std::size_t p = source.find(quoted, pos); p != std::string::npos; p = source.find(quoted, p + 1)) {
      std::size_t q = p + quoted.size();
      while (q < source.size() && std::isspace(static_cast<unsigned char>(source[q]))) ++q;
      if (q < source.size() && source[q] == ':') {
        found = p;
        break;
      }
    }
    if (found == std::string::npos) return 0;
    pos = found + quoted.size();
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return 1 + static_cast<int>(std::count(source.begin(), source.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

void AppConfig::validate() const {
  if (n_div < 1) throw ConfigError("n_div", "must be >= 1");
  solver.validate();
  analysis.validate();
  if (!(mu0 > 0.0)) throw ConfigError("mu0", "must be positive");
  if (n_problems < 1) throw ConfigError("n_problems", "must be >= 1");
  if (betas.empty()) throw ConfigError("betas", "must not be empty");
  for (double b : betas) {
    if (!(b > 1.0 && b < 2.0)) throw ConfigError("betas", "entries must lie in (1, 2)");
  }
  image.validate();
  if (hypergraphs != "none" && hypergraphs != "final" && hypergraphs != "all") {
    throw ConfigError("hypergraphs", "must be one of none, final, all");
  }
}

AppConfig config_from_json(const json& j, std::string_view source) {
  ConfigReader r(j, source);
  if (!j.is_object()) r.fail("", "config must be a JSON object");
  static const std::set<std::string> sections{"mesh", "solver", "problem", "extraction", "analysis",
                                               "ensemble", "image", "output"};
  for (const auto& [k, _] : j.items()) {
    if (!sections.count(k)) r.fail("/" + k, "unknown section");
  }

  AppConfig c;
  const json* mesh = r.section("mesh", {"n_div"});
  r.read(mesh, "mesh", "n_div", c.n_div);
  if (c.n_div < 1) r.fail("/mesh/n_div", "must be >= 1");

  const json* solver = r.section("solver", {"beta", "dt", "max_iter", "tau", "mu_floor", "linear_tol", "mu0"});
  r.read(solver, "solver", "beta", c.solver.beta);
  r.read(solver, "solver", "dt", c.solver.dt);
  r.read(solver, "solver", "max_iter", c.solver.max_iter);
  r.read(solver, "solver", "tau", c.solver.tau);
  r.read(solver, "solver", "mu_floor", c.solver.mu_floor);
  r.read(solver, "solver", "linear_tol", c.solver.linear_tol);
  r.read(solver, "solver", "mu0", c.mu0);
  try {
    c.solver.validate();
    if (!(c.mu0 > 0.0)) throw ConfigError("mu0", "must be positive");
  } catch (const ConfigError& e) {
    r.validation_failed(e, "solver");
  }

  const json* problem = r.section("problem", {"seed", "n_sinks", "radius", "sample_grid_divisions"});
  r.read(problem, "problem", "seed", c.problem_seed);
  r.read(problem, "problem", "n_sinks", c.problem.n_sinks);
  r.read(problem, "problem", "radius", c.problem.radius);
  r.read(problem, "problem", "sample_grid_divisions", c.problem.sample_grid_divisions);
  if (c.problem.n_sinks < 1) r.fail("/problem/n_sinks", "must be >= 1");
  if (c.problem.radius < 0.0) r.fail("/problem/radius", "must be >= 0 (0 selects 1.5 / n_div)");
  if (c.problem.sample_grid_divisions < 0) r.fail("/problem/sample_grid_divisions", "must be >= 0");

  const json* extraction = r.section("extraction", {"threshold_ratio"});
  r.read(extraction, "extraction", "threshold_ratio", c.analysis.threshold_ratio);
  if (!(c.analysis.threshold_ratio > 0.0 && c.analysis.threshold_ratio < 1.0)) {
    r.fail("/extraction/threshold_ratio", "must lie in (0, 1)");
  }

  const json* analysis = r.section("analysis", {"s_values", "p"});
  r.read(analysis, "analysis", "s_values", c.analysis.s_values);
  r.read(analysis, "analysis", "p", c.analysis.p);
  try {
    c.analysis.validate();
  } catch (const ConfigError& e) {
    r.validation_failed(e, "analysis");
  }

  const json* ensemble = r.section("ensemble", {"n_problems", "betas", "master_seed"});
  r.read(ensemble, "ensemble", "n_problems", c.n_problems);
  r.read(ensemble, "ensemble", "betas", c.betas);
  r.read(ensemble, "ensemble", "master_seed", c.master_seed);
  if (c.n_problems < 1) r.fail("/ensemble/n_problems", "must be >= 1");
  if (c.betas.empty()) r.fail("/ensemble/betas", "must not be empty");
  for (double b : c.betas) {
    if (!(b > 1.0 && b < 2.0)) r.fail("/ensemble/betas", "entries must lie in the open interval (1, 2)");
  }

  const json* image = r.section("image", {"manifest", "intensity_threshold", "downsample", "permissive",
                                          "moving_average", "s_values"});
  r.read(image, "image", "manifest", c.image_manifest);
  r.read(image, "image", "intensity_threshold", c.image.intensity_threshold);
  r.read(image, "image", "downsample", c.image.downsample);
  r.read(image, "image", "permissive", c.image.permissive);
  r.read(image, "image", "moving_average", c.image.moving_average);
  c.image.s_values = c.analysis.s_values;
  r.read(image, "image", "s_values", c.image.s_values);
  try {
    c.image.validate();
  } catch (const ConfigError& e) {
    r.validation_failed(e, "image");
  }

  const json* output = r.section("output", {"snapshots", "hypergraphs"});
  r.read(output, "output", "snapshots", c.snapshots);
  r.read(output, "output", "hypergraphs", c.hypergraphs);
  if (c.hypergraphs != "none" && c.hypergraphs != "final" && c.hypergraphs != "all") {
    r.fail("/output/hypergraphs", "must be one of none, final, all");
  }
  return c;
}

AppConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("kind")) {
    // a run manifest: the embedded snapshot has no source lines of its own
    return config_from_json(j.at("config"));
  }
  return config_from_json(j, text);
}

json to_json(const AppConfig& c) {
  return {
      {"mesh", {{"n_div", c.n_div}}},
      {"solver",
       {{"beta", c.solver.beta},
        {"dt", c.solver.dt},
        {"max_iter", c.solver.max_iter},
        {"tau", c.solver.tau},
        {"mu_floor", c.solver.mu_floor},
        {"linear_tol", c.solver.linear_tol},
        {"mu0", c.mu0}}},
      {"problem",
       {{"seed", c.problem_seed},
        {"n_sinks", c.problem.n_sinks},
        {"radius", c.problem.radius},
        {"sample_grid_divisions", c.problem.sample_grid_divisions}}},
      {"extraction", {{"threshold_ratio", c.analysis.threshold_ratio}}},
      {"analysis", {{"s_values", c.analysis.s_values}, {"p", c.analysis.p}}},
      {"ensemble", {{"n_problems", c.n_problems}, {"betas", c.betas}, {"master_seed", c.master_seed}}},
      {"image",
       {{"manifest", c.image_manifest},
        {"intensity_threshold", c.image.intensity_threshold},
        {"downsample", c.image.downsample},
        {"permissive", c.image.permissive},
        {"moving_average", c.image.moving_average},
        {"s_values", c.image.s_values}}},
      {"output", {{"snapshots", c.snapshots}, {"hypergraphs", c.hypergraphs}}},
  };
}

SolveOutcome run_solve(const AppConfig& cfg, const fs::path& out_dir, const std::string& run_id) {
  cfg.validate();
  auto mesh = std::make_shared<const Mesh>(triangulate_unit_square(cfg.n_div));
  return solve_into(cfg, std::move(mesh), out_dir, run_id, nullptr);
}

std::size_t BatchOutcome::failures() const {
  return static_cast<std::size_t>(std::count_if(jobs.begin(), jobs.end(), [](const JobOutcome& j) { return !j.ok; }));
}

BatchOutcome run_batch(const AppConfig& cfg, const fs::path& out_dir, int parallelism) {
  cfg.validate();
  if (parallelism < 1) throw ConfigError("parallelism", "must be >= 1");
  auto mesh = std::make_shared<const Mesh>(triangulate_unit_square(cfg.n_div));
  const auto jobs = generate_ensemble(cfg.n_problems, cfg.betas, cfg.master_seed);

  BatchOutcome outcome;
  outcome.jobs.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      JobOutcome& out = outcome.jobs[i];
      out.job = jobs[i];
      AppConfig job_cfg = cfg;
      job_cfg.solver.beta = jobs[i].beta;
      job_cfg.problem_seed = jobs[i].problem_seed;
      const json job_json = to_json(jobs[i]);
      try {
        SolveOutcome so = solve_into(job_cfg, mesh, out_dir / "jobs" / job_name(jobs[i].job_id),
                                     job_name(jobs[i].job_id), &job_json);
        out.analysis = std::move(so.analysis);
        out.steps = static_cast<int>(so.run.steps.size()) - 1;
        out.converged = so.run.converged;
        out.ok = true;
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(parallelism, static_cast<int>(jobs.size()));
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  }

  // aggregate per (beta, property, s) over successful jobs, in config order
  std::vector<AggregateSeries> series;
  for (double beta : cfg.betas) {
    std::vector<const JobOutcome*> group;
    for (const auto& j : outcome.jobs) {
      if (j.ok && j.job.beta == beta) group.push_back(&j);
    }
    if (group.empty()) continue;
    for (std::size_t k = 0; k < group.front()->analysis.traces.size(); ++k) {
      std::vector<const PropertyTrace*> traces;
      for (const auto* j : group) traces.push_back(&j->analysis.traces[k]);
      const auto& proto = *traces.front();
      series.push_back({proto.name, proto.s, beta, aggregate(traces)});
    }
  }
  write_file(out_dir / "aggregate.csv", aggregate_csv(series));

  std::vector<std::string> keys;
  for (const auto& j : outcome.jobs) {
    if (!j.ok) continue;
    for (const auto& [k, _] : j.analysis.report.t_property) keys.push_back(k);
    break;
  }
  std::string summary = "job_id,problem_index,beta,status,steps,converged,t_cost";
  for (const auto& k : keys) summary += ",t_" + k;
  summary += "\n";
  json job_list = json::array();
  for (const auto& j : outcome.jobs) {
    summary += std::to_string(j.job.job_id) + "," + std::to_string(j.job.problem_index) + "," +
               format_number(j.job.beta) + "," + (j.ok ? "ok" : "failed") + "," + std::to_string(j.steps) + "," +
               (j.converged ? "1" : "0") + "," + (j.ok ? std::to_string(j.analysis.report.t_cost) : "");
    for (const auto& k : keys) {
      summary += ",";
      if (j.ok) summary += std::to_string(j.analysis.report.t_property.at(k));
    }
    summary += "\n";
    json entry = to_json(j.job);
    entry["directory"] = "jobs/" + job_name(j.job.job_id);
    entry["status"] = j.ok ? "ok" : "failed";
    if (!j.ok) entry["error"] = j.error;
    job_list.push_back(std::move(entry));
  }
  write_file(out_dir / "summary.csv", summary);

  const json manifest = {{"kind", "batch"},
                         {"config", to_json(cfg)},
                         {"jobs", std::move(job_list)},
                         {"failures", outcome.failures()},
                         {"std_form", "population"},
                         {"alignment", "hold last value"}};
  write_file(out_dir / "batch_manifest.json", dump_json(manifest));
  return outcome;
}

ImageSequenceAnalysis run_image(const AppConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.image_manifest.empty()) throw ConfigError("/image/manifest", "no image manifest given");
  const auto manifest = load_image_manifest(cfg.image_manifest);
  ImageSequenceAnalysis analysis = analyze_image_sequence(manifest, cfg.image);

  ArtifactWriter w(out_dir);
  for (std::size_t i = 0; i < analysis.frames.size(); ++i) {
    w.write("frames/" + frame_name(analysis.frames[i]), dump_json(to_json(analysis.hypergraphs[i])));
  }
  w.write("traces.csv", trace_csv(analysis.traces, "image"));
  const json window = {{"found", analysis.consolidation.found},
                       {"start", analysis.consolidation.start},
                       {"end", analysis.consolidation.end},
                       {"moving_average", cfg.image.moving_average}};
  w.write("consolidation.json", dump_json(window));

  json frames = json::array();
  for (const auto& f : manifest.frames) frames.push_back(f.string());
  json errors = json::array();
  for (const auto& e : analysis.errors) errors.push_back({{"frame", e.frame}, {"message", e.message}});
  const json out = {{"kind", "image"},
                    {"config", to_json(cfg)},
                    {"frames", std::move(frames)},
                    {"interval_seconds", manifest.interval_seconds},
                    {"errors", std::move(errors)},
                    {"empty_frames", analysis.empty_frames},
                    {"artifacts", w.hashes()}};
  write_file(out_dir / "manifest.json", dump_json(out));
  return analysis;
}

RunAnalysis run_props(const AppConfig& cfg, const fs::path& run_dir, const fs::path& out_dir) {
  const AppConfig stored = parse_config(read_file(run_dir / "manifest.json"));
  const auto fields = decode_snapshots(read_file(run_dir / "mu.bin"));
  const Mesh mesh = triangulate_unit_square(stored.n_div);

  // costs are not recomputed from mu alone; take them from the stored run
  const json manifest = json::parse(read_file(run_dir / "manifest.json"));
  DmkRun run;
  const auto& cost_rows = manifest.at("cost");
  if (cost_rows.size() != fields.size()) throw IoError("manifest and snapshots disagree on step count");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    CostBreakdown c{cost_rows[i].at("total").get<double>(), cost_rows[i].at("energy").get<double>(),
                    cost_rows[i].at("structure").get<double>()};
    run.steps.push_back({fields[i], {}, c});
  }

  RunAnalysis analysis = analyze_run(mesh, run, stored.solver.beta, cfg.analysis);
  const std::string run_id = manifest.value("run_id", std::string("run"));
  write_file(out_dir / "traces.csv", trace_csv(analysis.traces, run_id));
  write_file(out_dir / "properties.csv", property_csv(analysis.traces));
  write_file(out_dir / "convergence.json", dump_json(to_json(analysis.report)));
  return analysis;
}

ProblemSpec run_gen(const AppConfig& cfg) {
  auto mesh = std::make_shared<const Mesh>(triangulate_unit_square(cfg.n_div));
  return generate_problem(cfg.problem_seed, mesh, cfg.problem).spec;
}

}  // namespace hyperot
