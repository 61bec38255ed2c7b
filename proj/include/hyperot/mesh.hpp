#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperot/geometry.hpp"

namespace hyperot {

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Triangulation of the unit square. Immutable once built.
///
/// Edges are stored with sorted endpoints and in lexicographic order. For
/// every edge, `edge_triangles()` holds its incident triangles; the second
/// slot is -1 on the boundary.
class Mesh {
 public:
  Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles);

  const std::vector<Point2>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<double>& triangle_areas() const noexcept { return areas_; }
  const std::vector<std::array<int, 2>>& edge_triangles() const noexcept { return edge_tris_; }
  /// Edge indices of each triangle's three sides.
  const std::vector<std::array<int, 3>>& triangle_edges() const noexcept { return tri_edges_; }
  /// Lumped vertex weights: one third of every incident triangle's area.
  const std::vector<double>& vertex_weights() const noexcept { return vertex_weights_; }

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }
  double total_area() const;

  /// Grid divisions for meshes from triangulate_unit_square, 0 otherwise.
  int n_div() const noexcept { return n_div_; }

 private:
  friend Mesh triangulate_unit_square(int n_div);

  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> edges_;
  std::vector<double> areas_;
  std::vector<std::array<int, 2>> edge_tris_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<double> vertex_weights_;
  int n_div_ = 0;
};

/// Regular (n_div+1)^2 vertex grid, each cell split along its
/// bottom-left to top-right diagonal. Throws ConfigError for n_div < 1.
Mesh triangulate_unit_square(int n_div);

nlohmann::json to_json(const Mesh& mesh);
Mesh mesh_from_json(const nlohmann::json& j);

}  // namespace hyperot
