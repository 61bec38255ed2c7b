#include <doctest.h>

#include <map>
#include <random>

#include "hyperot/errors.hpp"
#include "hyperot/mesh.hpp"

using namespace hyperot;

TEST_CASE("unit square sizes") {
  const Mesh m1 = triangulate_unit_square(1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_triangles() == 2);
  CHECK(m1.total_area() == doctest::Approx(1.0).epsilon(1e-15));

  const Mesh m8 = triangulate_unit_square(8);
  CHECK(m8.num_vertices() == 81);
  CHECK(m8.num_triangles() == 128);
  CHECK(m8.n_div() == 8);

  CHECK_THROWS_AS(triangulate_unit_square(0), ConfigError);
}

TEST_CASE("edge incidence by exhaustive scan, n_div = 3") {
  const Mesh m = triangulate_unit_square(3);
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles()) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++count[{a, b}];
    }
  }
  int boundary = 0, interior = 0;
  for (const auto& [e, c] : count) {
    REQUIRE((c == 1 || c == 2));
    const auto& pa = m.vertices()[e.first];
    const auto& pb = m.vertices()[e.second];
    const bool on_boundary = (pa.x == 0 && pb.x == 0) || (pa.x == 1 && pb.x == 1) || (pa.y == 0 && pb.y == 0) ||
                             (pa.y == 1 && pb.y == 1);
    CHECK((c == 1) == on_boundary);
    (c == 1 ? boundary : interior)++;
  }
  CHECK(boundary == 12);
  CHECK(interior == 21);
  CHECK(m.edges().size() == count.size());

  // the mesh's own incidence tables agree with the scan
  int incidences = 0;
  for (std::size_t e = 0; e < m.edges().size(); ++e) {
    const auto [a, b] = m.edges()[e];
    const auto& et = m.edge_triangles()[e];
    const int c = (et[0] >= 0) + (et[1] >= 0);
    CHECK(c == count.at({a, b}));
    incidences += c;
  }
  CHECK(incidences == 3 * static_cast<int>(m.num_triangles()));
}

TEST_CASE("triangle area") {
  CHECK(triangle_area({0, 0}, {1, 0}, {0, 1}) == 0.5);
  CHECK(triangle_area({0, 0}, {1, 1}, {2, 2}) == 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    CHECK(triangle_area(a, b, c) == doctest::Approx(0.5 * std::abs(cross)).epsilon(1e-14));
  }
}

TEST_CASE("area additivity and orientation for every n_div") {
  for (int n = 1; n <= 64; n = n < 8 ? n + 1 : n * 2) {
    const Mesh m = triangulate_unit_square(n);
    double sum = 0.0;
    for (double a : m.triangle_areas()) sum += a;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (const auto& t : m.triangles()) {
      CHECK(signed_area2(m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]]) > 0.0);
    }
    double w = 0.0;
    for (double x : m.vertex_weights()) w += x;
    CHECK(std::abs(w - 1.0) <= 1e-12);
  }
}

TEST_CASE("constructor rejects bad input") {
  const std::vector<Point2> v{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  CHECK_THROWS_AS(Mesh(v, {{0, 2, 1}}), ConfigError);  // clockwise
  CHECK_THROWS_AS(Mesh(v, {{0, 1, 7}}), ConfigError);  // out of range
  CHECK_THROWS_AS(Mesh({{0, 0}, {1, 1}, {2, 2}}, {{0, 1, 2}}), ConfigError);  // degenerate
  CHECK_NOTHROW(Mesh(v, {{0, 1, 3}, {0, 3, 2}}));
}

TEST_CASE("json round trip") {
  const Mesh m = triangulate_unit_square(3);
  const Mesh back = mesh_from_json(to_json(m));
  CHECK(back.vertices() == m.vertices());
  CHECK(back.triangles() == m.triangles());
}
