#include "hyperot/mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hyperot/errors.hpp"

namespace hyperot {

Mesh::Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nv = static_cast<int>(vertices_.size());
  areas_.reserve(triangles_.size());
  vertex_weights_.assign(vertices_.size(), 0.0);

  std::map<Edge, std::array<int, 2>> incidence;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) throw ConfigError("triangles", "vertex index out of range");
    }
    const double a2 = signed_area2(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
    if (!(a2 > 0.0)) throw ConfigError("triangles", "triangle " + std::to_string(t) + " is not counterclockwise with positive area");
    areas_.push_back(0.5 * a2);
    for (int v : tri) vertex_weights_[v] += a2 / 6.0;

    for (int k = 0; k < 3; ++k) {
      Edge e{tri[k], tri[(k + 1) % 3]};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      auto [it, inserted] = incidence.try_emplace(e, std::array<int, 2>{static_cast<int>(t), -1});
      if (!inserted) {
        if (it->second[1] != -1) throw ConfigError("triangles", "edge shared by more than two triangles");
        it->second[1] = static_cast<int>(t);
      }
    }
  }

  edges_.reserve(incidence.size());
  edge_tris_.reserve(incidence.size());
  for (const auto& [e, tris] : incidence) {
    edges_.push_back(e);
    edge_tris_.push_back(tris);
  }

  tri_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      Edge e{tri[k], tri[(k + 1) % 3]};
      if (e[0] > e[1]) std::swap(e[0], e[1]);
      auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
      tri_edges_[t][k] = static_cast<int>(it - edges_.begin());
    }
  }
}

double Mesh::total_area() const {
  return std::accumulate(areas_.begin(), areas_.end(), 0.0);
}

Mesh triangulate_unit_square(int n_div) {
  if (n_div < 1) throw ConfigError("n_div", "must be >= 1");
  const int n1 = n_div + 1;
  const double h = 1.0 / n_div;

  std::vector<Point2> vertices;
  vertices.reserve(static_cast<std::size_t>(n1) * n1);
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n1; ++i) {
      // exact endpoints, no accumulated rounding at x = 1
      vertices.push_back({i == n_div ? 1.0 : i * h, j == n_div ? 1.0 : j * h});
    }
  }

  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n_div) * n_div);
  for (int j = 0; j < n_div; ++j) {
    for (int i = 0; i < n_div; ++i) {
      const int v00 = j * n1 + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + n1;
      const int v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }

  Mesh mesh(std::move(vertices), std::move(triangles));
  mesh.n_div_ = n_div;
  return mesh;
}

nlohmann::json to_json(const Mesh& mesh) {
  nlohmann::json verts = nlohmann::json::array();
  for (const auto& p : mesh.vertices()) verts.push_back({p.x, p.y});
  nlohmann::json tris = nlohmann::json::array();
  for (const auto& t : mesh.triangles()) tris.push_back({t[0], t[1], t[2]});
  return {{"vertices", std::move(verts)}, {"triangles", std::move(tris)}};
}

Mesh mesh_from_json(const nlohmann::json& j) {
  std::vector<Point2> vertices;
  for (const auto& v : j.at("vertices")) vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
  std::vector<Triangle> triangles;
  for (const auto& t : j.at("triangles")) triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  return Mesh(std::move(vertices), std::move(triangles));
}

}  // namespace hyperot
