#include <doctest.h>

#include <memory>
#include <set>

#include "hyperot/errors.hpp"
#include "hyperot/synth.hpp"

using namespace hyperot;

TEST_CASE("default problem shape") {
  auto mesh = std::make_shared<const Mesh>(triangulate_unit_square(32));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto gp = generate_problem(seed, mesh);
    CHECK(gp.spec.source_center == Point2{0.0, 0.0});
    REQUIRE(gp.spec.sink_centers.size() == 15);
    std::set<std::pair<double, double>> distinct;
    for (const auto& c : gp.spec.sink_centers) {
      distinct.insert({c.x, c.y});
      CHECK(distance(c, gp.spec.source_center) > 2.0 * gp.spec.radius);
    }
    CHECK(distinct.size() == 15);
    CHECK(std::abs(forcing_mass(*mesh, gp.problem.forcing)) <= 1e-12);
    CHECK_NOTHROW(check_mass_balance(*mesh, gp.problem.forcing));
  }
}

TEST_CASE("generation is a pure function of the seed") {
  auto mesh = std::make_shared<const Mesh>(triangulate_unit_square(32));
  const auto a = generate_problem(3, mesh);
  const auto b = generate_problem(3, mesh);
  CHECK(a.spec == b.spec);
  CHECK(a.problem.forcing.values == b.problem.forcing.values);
  CHECK_FALSE(generate_problem(4, mesh).spec == a.spec);
  // frozen draw: guards the sampler against silent changes
  CHECK(a.spec.sink_centers.front() == Point2{0.5625, 1.0});
  CHECK(problem_spec_from_json(to_json(a.spec)) == a.spec);
}

TEST_CASE("rng bound") {
  SeededRng rng(1);
  for (std::uint64_t bound : {1ULL, 2ULL, 7ULL, 1000ULL}) {
    for (int i = 0; i < 200; ++i) CHECK(rng.below(bound) < bound);
  }
  CHECK_THROWS(rng.below(0));
}

TEST_CASE("forcing construction errors") {
  const Mesh m = triangulate_unit_square(8);
  ProblemSpec tiny{{0.0, 0.0}, {{0.55, 0.55}}, 0.01, 0, 1};
  try {
    build_forcing(m, tiny);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("(0.55, 0.55)") != std::string::npos);
  }
  ProblemSpec overlap{{0.5, 0.5}, {{0.5, 0.5}}, 0.2, 0, 1};
  CHECK_THROWS_AS(build_forcing(m, overlap), ConfigError);

  auto mesh = std::make_shared<const Mesh>(m);
  ProblemOptions too_many;
  too_many.n_sinks = 1000;
  CHECK_THROWS_AS(generate_problem(0, mesh, too_many), ConfigError);
}

TEST_CASE("ensembles") {
  const std::vector<double> nine{1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9};
  CHECK(generate_ensemble(100, nine, 0).size() == 900);
  CHECK(generate_ensemble(1, {1.5}, 0).size() == 1);

  const auto a = generate_ensemble(10, {1.2, 1.5, 1.8}, 12345);
  const auto b = generate_ensemble(10, {1.2, 1.5, 1.8}, 12345);
  std::set<std::uint64_t> job_seeds, problem_seeds;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].job_seed == b[i].job_seed);
    CHECK(a[i].problem_seed == b[i].problem_seed);
    CHECK(a[i].job_id == static_cast<int>(i));
    job_seeds.insert(a[i].job_seed);
    problem_seeds.insert(a[i].problem_seed);
    // betas of one problem share its seed
    CHECK(a[i].problem_seed == a[i - i % 3].problem_seed);
  }
  CHECK(job_seeds.size() == 30);
  CHECK(problem_seeds.size() == 10);
  CHECK(generate_ensemble(10, {1.5}, 1).front().problem_seed != a.front().problem_seed);
  CHECK_THROWS_AS(generate_ensemble(0, {1.5}, 0), ConfigError);
  CHECK_THROWS_AS(generate_ensemble(3, {}, 0), ConfigError);
}
