// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "hyperot/app.hpp"
#include "hyperot/extract.hpp"
#include "hyperot/hyper.hpp"
#include "hyperot/io.hpp"
#include "images.hpp"
#include "support.hpp"

using namespace hyperot;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::vector<Verdict> verdicts;

void report(const std::string& id, bool pass, const std::string& detail) {
  verdicts.push_back({id, pass, detail});
  std::cout << (pass ? "PASS " : "FAIL ") << id << "  " << detail << std::endl;
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

int hardware_jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

AppConfig ensemble_config() {
  AppConfig c;
  c.n_div = 32;
  c.n_problems = 10;
  c.betas = {1.2, 1.5, 1.8};
  c.master_seed = 2024;
  c.analysis.p = 1.05;
  c.snapshots = false;
  c.hypergraphs = "final";
  return c;
}

double final_value(const RunAnalysis& a, const std::string& name, int s = 0) {
  return a.trace(name, s).values.back().value;
}

// ---------------------------------------------------------------- 1-4, 9a

struct EnsembleResult {
  AppConfig cfg;
  fs::path dir;
  BatchOutcome batch;
};

EnsembleResult run_ensemble() {
  EnsembleResult r;
  r.cfg = ensemble_config();
  r.dir = testsupport::fresh_dir("acceptance_ensemble");
  const auto t0 = std::chrono::steady_clock::now();
  r.batch = run_batch(r.cfg, r.dir, hardware_jobs());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "ensemble: " << r.batch.jobs.size() << " runs, " << r.batch.failures() << " failed, " << fmt(secs, 3)
            << " s" << std::endl;
  return r;
}

void criterion_1(const EnsembleResult& e) {
  int ok = 0;
  for (const auto& j : e.batch.jobs) {
    if (j.ok && j.analysis.report.t_property.at("covered_area") > j.analysis.report.t_cost) ++ok;
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(e.batch.jobs.size());
  report("c1 t_P(S) > t_L", e.batch.failures() == 0 && frac >= 0.9,
         std::to_string(ok) + "/" + std::to_string(e.batch.jobs.size()) + " runs (need >= 90%)");
}

void criterion_2(const EnsembleResult& e) {
  // jobs are problem-major with betas in config order
  const std::size_t nb = e.cfg.betas.size();
  int mono_l = 0, mono_s = 0, problems = 0;
  std::ostringstream rows;
  for (std::size_t p = 0; p * nb < e.batch.jobs.size(); ++p) {
    std::vector<int> tl, ts;
    bool ok = true;
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& j = e.batch.jobs[p * nb + b];
      ok = ok && j.ok;
      if (!j.ok) break;
      tl.push_back(j.analysis.report.t_cost);
      ts.push_back(j.analysis.report.t_property.at("covered_area"));
    }
    if (!ok) continue;
    ++problems;
    mono_l += std::is_sorted(tl.begin(), tl.end());
    mono_s += std::is_sorted(ts.begin(), ts.end());
    rows << " p" << p << ":L(" << tl[0] << "," << tl[1] << "," << tl[2] << ")S(" << ts[0] << "," << ts[1] << ","
         << ts[2] << ")";
  }
  const double fl = problems ? static_cast<double>(mono_l) / problems : 0.0;
  const double fs_ = problems ? static_cast<double>(mono_s) / problems : 0.0;
  std::cout << "  c2 per-problem convergence times:" << rows.str() << std::endl;
  report("c2 t_L and t_P(S) non-decreasing in beta", problems == 10 && fl >= 0.8 && fs_ >= 0.8,
         "t_L monotone in " + std::to_string(mono_l) + "/" + std::to_string(problems) + ", t_P(S) monotone in " +
             std::to_string(mono_s) + "/" + std::to_string(problems) + " problems (need >= 80% each)");

  // the same ordering stated as iterations to the tau test on one problem
  auto mesh = std::make_shared<const Mesh>(triangulate_unit_square(16));
  const auto problem = generate_problem(e.batch.jobs.front().job.problem_seed, mesh).problem;
  SolverConfig lo, hi;
  lo.beta = 1.1;
  hi.beta = 1.9;
  lo.tau = hi.tau = 1e-6;
  lo.max_iter = hi.max_iter = 3000;
  const auto it_lo = run_dmk(problem, lo).steps.size() - 1;
  const auto it_hi = run_dmk(problem, hi).steps.size() - 1;
  report("c2 iterations to tau grow with beta", it_hi >= it_lo,
         "beta 1.1: " + std::to_string(it_lo) + " iterations, beta 1.9: " + std::to_string(it_hi) + " (n_div 16, tau 1e-6)");
}

void criterion_3(const EnsembleResult& e) {
  const std::vector<std::pair<std::string, int>> metrics{
      {"hyperedges", 0}, {"triangles", 0}, {"covered_area", 0}, {"s_degree", 1}};
  bool pass = e.batch.failures() == 0;
  std::ostringstream detail;
  for (const auto& [name, s] : metrics) {
    std::vector<double> means;
    for (double beta : e.cfg.betas) {
      double sum = 0.0;
      int n = 0;
      for (const auto& j : e.batch.jobs) {
        if (j.ok && j.job.beta == beta) {
          sum += final_value(j.analysis, name, s);
          ++n;
        }
      }
      means.push_back(n ? sum / n : 0.0);
    }
    bool dec = true;
    for (std::size_t k = 1; k < means.size(); ++k) dec = dec && means[k] < means[k - 1];
    pass = pass && dec;
    detail << name << (s ? "_" + std::to_string(s) : "") << "=(";
    for (std::size_t k = 0; k < means.size(); ++k) detail << (k ? "," : "") << fmt(means[k]);
    detail << ") ";
  }
  report("c3 converged metrics decrease in beta", pass, detail.str());
}

void criterion_4(const EnsembleResult& e) {
  int violations = 0, negatives = 0;
  double worst = 0.0;
  for (const auto& j : e.batch.jobs) {
    if (!j.ok) continue;
    const auto& total = j.analysis.trace("cost_total").values;
    const auto& energy = j.analysis.trace("cost_energy").values;
    const auto& structure = j.analysis.trace("cost_structure").values;
    for (std::size_t t = 1; t + 1 < total.size(); ++t) {
      const double rel = (total[t + 1].value - total[t].value) / total[t].value;
      worst = std::max(worst, rel);
      violations += total[t + 1].value > total[t].value * (1.0 + 1e-8);
    }
    for (std::size_t t = 0; t < total.size(); ++t) negatives += energy[t].value < 0.0 || structure[t].value < 0.0;
  }
  report("c4 Lyapunov descent", e.batch.failures() == 0 && violations == 0 && negatives == 0,
         std::to_string(violations) + " descent violations, " + std::to_string(negatives) +
             " negative terms, worst relative increase " + fmt(worst, 3));
}

void criterion_9(const EnsembleResult& e) {
  // (a) re-run two jobs from their manifests alone
  int mismatches = 0, compared = 0;
  for (int id : {0, 17}) {
    char name[32];
    std::snprintf(name, sizeof name, "jobs/job_%04d", id);
    const fs::path job_dir = e.dir / name;
    const fs::path rerun = testsupport::fresh_dir("acceptance_rerun_" + std::to_string(id));
    run_solve(parse_config(read_file(job_dir / "manifest.json")), rerun, fs::path(name).filename().string());
    std::vector<fs::path> files{"traces.csv", "cost.csv", "convergence.json"};
    for (const auto& f : fs::directory_iterator(job_dir / "hypergraphs")) {
      files.push_back(fs::path("hypergraphs") / f.path().filename());
    }
    for (const auto& f : files) {
      ++compared;
      mismatches += read_file(job_dir / f) != read_file(rerun / f);
    }
  }

  // (b) the same small batch at parallelism 1 and N
  AppConfig small = ensemble_config();
  small.n_div = 16;
  small.n_problems = 4;
  small.solver.max_iter = 80;
  small.hypergraphs = "none";
  const fs::path serial = testsupport::fresh_dir("acceptance_p1");
  const fs::path parallel = testsupport::fresh_dir("acceptance_pn");
  const int n = std::max(4, hardware_jobs());
  run_batch(small, serial, 1);
  run_batch(small, parallel, n);
  int agg_diff = 0;
  for (const char* f : {"aggregate.csv", "summary.csv", "batch_manifest.json"}) {
    agg_diff += read_file(serial / f) != read_file(parallel / f);
  }
  report("c9 reproducibility", mismatches == 0 && agg_diff == 0,
         std::to_string(compared - mismatches) + "/" + std::to_string(compared) +
             " rerun artifacts byte-identical; aggregates at parallelism 1 vs " + std::to_string(n) + ": " +
             (agg_diff ? "differ" : "identical"));
}

// ---------------------------------------------------------------- 5

std::set<std::array<int, 2>> edge_set(const SpatialGraph& g) { return {g.edges.begin(), g.edges.end()}; }

std::vector<std::vector<bool>> dense_adjacency(const SpatialGraph& g) {
  const NodeIndex idx(g.nodes);
  std::vector<std::vector<bool>> a(g.nodes.size(), std::vector<bool>(g.nodes.size(), false));
  for (const auto& [u, v] : g.edges) a[idx(u)][idx(v)] = a[idx(v)][idx(u)] = true;
  return a;
}

int a1_mismatches(const Hypergraph& h) {
  const auto a1 = s_adjacency(h, 1);
  const auto sk = dense_adjacency(skeleton(h));
  int bad = 0;
  for (std::size_t i = 0; i < a1.size(); ++i)
    for (std::size_t j = 0; j < a1.size(); ++j) bad += a1.at(i, j) != sk[i][j];
  return bad;
}

void criterion_5(const EnsembleResult& e) {
  std::mt19937_64 rng(5);
  int tri_bad = 0, as_bad = 0, clo_bad = 0, a1_bad = 0, a1_checked = 0;

  // (a) triangles vs all C(12,3) triples
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testsupport::random_graph(rng, 12, 0.1 + 0.005 * trial);
    const auto es = edge_set(g);
    auto has = [&](int a, int b) { return es.count({std::min(a, b), std::max(a, b)}) > 0; };
    std::set<std::array<int, 3>> expected, got;
    for (int a = 0; a < 12; ++a)
      for (int b = a + 1; b < 12; ++b)
        for (int c = b + 1; c < 12; ++c)
          if (has(a, b) && has(b, c) && has(a, c)) expected.insert({a, b, c});
    const auto h = hypergraph_from_graph(g);
    for (const auto& he : h.hyperedges)
      if (he.size() == 3) got.insert({he[0], he[1], he[2]});
    tri_bad += expected != got;
    a1_bad += a1_mismatches(h);
    ++a1_checked;
  }

  // (b) A_s vs direct counting
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = testsupport::random_hypergraph(rng, 10 + trial % 5, 12, 8);
    const std::size_t n = h.nodes.size();
    for (int s : {1, 2, 3}) {
      const auto a = s_adjacency(h, s);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          int shared = 0;
          for (const auto& he : h.hyperedges) {
            const auto ids = he.ids();
            shared += i != j && std::count(ids.begin(), ids.end(), h.nodes[i].id) &&
                      std::count(ids.begin(), ids.end(), h.nodes[j].id);
          }
          as_bad += a.at(i, j) != (shared >= s);
        }
      }
    }
    a1_bad += a1_mismatches(h);
    ++a1_checked;

    // (c) closeness on the s-line graphs vs all-pairs BFS
    for (int s : {1, 2}) {
      const auto expected = testsupport::harmonic_closeness(dense_adjacency(s_line_graph(h, s)));
      const auto got = s_closeness(h, s).values;
      for (std::size_t i = 0; i < n; ++i) clo_bad += std::abs(got[i] - expected[i]) > 1e-12 * (1.0 + expected[i]);
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testsupport::random_graph(rng, 15, 0.08 + 0.002 * trial);
    const auto expected = testsupport::harmonic_closeness(dense_adjacency(g));
    const auto got = closeness(g).values;
    for (std::size_t i = 0; i < got.size(); ++i) clo_bad += std::abs(got[i] - expected[i]) > 1e-12 * (1.0 + expected[i]);
  }

  // (d) also on the final hypergraph of every ensemble run
  for (const auto& j : e.batch.jobs) {
    if (!j.ok) continue;
    char name[32];
    std::snprintf(name, sizeof name, "jobs/job_%04d", j.job.job_id);
    for (const auto& f : fs::directory_iterator(e.dir / name / "hypergraphs")) {
      a1_bad += a1_mismatches(hypergraph_from_json(nlohmann::json::parse(read_file(f.path()))));
      ++a1_checked;
    }
  }

  report("c5 oracle equivalence", tri_bad + as_bad + clo_bad + a1_bad == 0,
         "mismatches: triangles " + std::to_string(tri_bad) + ", A_s " + std::to_string(as_bad) + ", closeness " +
             std::to_string(clo_bad) + ", A_1 vs skeleton " + std::to_string(a1_bad) + " over " +
             std::to_string(a1_checked) + " hypergraphs");
}

// ---------------------------------------------------------------- 6

// u = cos(pi x) cos(2 pi y) has zero normal derivative on the square and zero
// mean; f = -lap u = 5 pi^2 u.
double manufactured_error(int n_div) {
  const double pi = std::numbers::pi;
  auto exact = [pi](double x, double y) { return std::cos(pi * x) * std::cos(2 * pi * y); };
  const Mesh m = triangulate_unit_square(n_div);
  ForcingField f;
  for (const auto& v : m.vertices()) f.values.push_back(5 * pi * pi * exact(v.x, v.y));
  const ConductivityField mu{std::vector<double>(m.num_triangles(), 1.0), 0};
  const auto u = assemble_and_solve_potential(m, mu, f, 1e-13);

  // 7-point degree-5 rule on each triangle
  static const double w[7] = {0.225, 0.132394152788506, 0.132394152788506, 0.132394152788506,
                              0.125939180544827, 0.125939180544827, 0.125939180544827};
  static const double a1 = 0.059715871789770, b1 = 0.470142064105115;
  static const double a2 = 0.797426985353087, b2 = 0.101286507323456;
  static const double bary[7][3] = {{1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
                                    {a2, b2, b2},                {b2, a2, b2}, {b2, b2, a2}};
  double err2 = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    for (int q = 0; q < 7; ++q) {
      double x = 0, y = 0, uh = 0;
      for (int k = 0; k < 3; ++k) {
        x += bary[q][k] * m.vertices()[tri[k]].x;
        y += bary[q][k] * m.vertices()[tri[k]].y;
        uh += bary[q][k] * u.u[tri[k]];
      }
      const double d = uh - exact(x, y);
      err2 += w[q] * m.triangle_areas()[t] * d * d;
    }
  }
  return std::sqrt(err2);
}

void criterion_6() {
  const double e8 = manufactured_error(8), e16 = manufactured_error(16), e32 = manufactured_error(32);
  const double r1 = e8 / e16, r2 = e16 / e32;
  report("c6 elliptic solver convergence", r1 >= 2.0 && r2 >= 2.0,
         "L2 error " + fmt(e8) + " -> " + fmt(e16) + " -> " + fmt(e32) + ", ratios " + fmt(r1, 3) + ", " +
             fmt(r2, 3) + " (need >= 2)");
}

// ---------------------------------------------------------------- 7

void criterion_7() {
  std::mt19937_64 rng(7);
  int round_trip_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = testsupport::random_graph(rng, 3 + trial % 20, 0.05 + 0.004 * trial);
    round_trip_bad += !(skeleton(hypergraph_from_graph(g)) == g);
  }
  double worst_m = 0.0, worst_area = 0.0;
  for (int n = 1; n <= 128; n = n < 16 ? n + 1 : n * 2) {
    const Mesh m = triangulate_unit_square(n);
    const ConductivityField mu{std::vector<double>(m.num_triangles(), 1.0), 0};
    const PotentialField u{std::vector<double>(m.num_vertices(), 0.0)};
    worst_m = std::max(worst_m, std::abs(lyapunov_cost(m, mu, u, 1.5).structure - 1.0));
    double sum = 0.0;
    for (double a : m.triangle_areas()) sum += a;
    worst_area = std::max(worst_area, std::abs(sum - 1.0));
  }
  report("c7 structural identities", round_trip_bad == 0 && worst_m <= 1e-10 && worst_area <= 1e-12,
         std::to_string(round_trip_bad) + "/200 round-trip failures, max |M - 1| = " + fmt(worst_m, 3) +
             ", max |sum area - 1| = " + fmt(worst_area, 3));
}

// ---------------------------------------------------------------- 8

void criterion_8() {
  const fs::path in = testsupport::fresh_dir("acceptance_blob_in");
  const fs::path out = testsupport::fresh_dir("acceptance_blob_out");
  std::vector<GrayImage> frames;
  for (int k = 0; k < 20; ++k) {
    // main body plus a lobe, both retracting
    auto img = testsupport::disk_image(96, 96, 48, 48, 40.0 - 1.6 * k);
    const auto lobe = testsupport::disk_image(96, 96, 70, 30, 18.0 - 0.8 * k);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = std::max(img.pixels[i], lobe.pixels[i]);
    frames.push_back(std::move(img));
  }
  AppConfig cfg;
  cfg.image_manifest = testsupport::write_sequence(in, frames).string();
  cfg.image.downsample = 2;
  const auto a = run_image(cfg, out);
  const auto& s = a.trace("covered_area").values;
  bool dec = s.size() == 20;
  for (std::size_t i = 1; i < s.size(); ++i) dec = dec && s[i].value < s[i - 1].value;
  report("c8 image pipeline", dec && a.consolidation.found,
         "S " + fmt(s.front().value) + " -> " + fmt(s.back().value) + (dec ? " strictly decreasing" : " NOT monotone") +
             ", consolidation window " +
             (a.consolidation.found
                  ? "[" + std::to_string(a.consolidation.start) + ", " + std::to_string(a.consolidation.end) + "]"
                  : "empty"));
}

}  // namespace

int main() {
  const auto ensemble = run_ensemble();
  criterion_1(ensemble);
  criterion_2(ensemble);
  criterion_3(ensemble);
  criterion_4(ensemble);
  criterion_5(ensemble);
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9(ensemble);

  std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  int failed = 0;
  std::cout << "\nsummary\n";
  for (const auto& v : verdicts) {
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.id << "\n";
    failed += !v.pass;
  }
  std::cout << failed << " of " << verdicts.size() << " criteria failed" << std::endl;
  return failed ? 1 : 0;
}
