#include "hyperot/extract.hpp"

#include <algorithm>

#include "hyperot/errors.hpp"

namespace hyperot {

SpatialGraph graph_from_field(const Mesh& mesh, const ConductivityField& mu, double threshold_ratio) {
  if (mu.mu.size() != mesh.num_triangles()) throw ConfigError("mu", "size does not match triangle count");
  if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0)) {
    throw ConfigError("threshold_ratio", "must lie in (0, 1)");
  }
  const double peak = *std::max_element(mu.mu.begin(), mu.mu.end());
  if (!(peak > 0.0)) throw ConfigError("mu", "field has no positive value at step " + std::to_string(mu.time_index));
  const double cut = threshold_ratio * peak;

  std::vector<char> vertex_on(mesh.num_vertices(), 0);
  std::vector<char> edge_on(mesh.edges().size(), 0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mu.mu[t] < cut) continue;
    for (int v : mesh.triangles()[t]) vertex_on[v] = 1;
    for (int e : mesh.triangle_edges()[t]) edge_on[e] = 1;
  }

  SpatialGraph g;
  for (std::size_t v = 0; v < vertex_on.size(); ++v) {
    if (vertex_on[v]) g.nodes.push_back({static_cast<int>(v), mesh.vertices()[v]});
  }
  // mesh edges are already sorted with a < b
  for (std::size_t e = 0; e < edge_on.size(); ++e) {
    if (edge_on[e]) g.edges.push_back(mesh.edges()[e]);
  }
  return g;
}

Hypergraph hypergraph_from_graph(const SpatialGraph& g) {
  Hypergraph h;
  h.nodes = g.nodes;
  const auto adj = adjacency_lists(g);
  const auto id = [&](int dense) { return g.nodes[dense].id; };

  for (const auto& e : g.edges) h.hyperedges.emplace_back(e[0], e[1]);

  // a < b < c in dense order; common neighbors above b close a triangle
  std::vector<int> common;
  for (std::size_t a = 0; a < adj.size(); ++a) {
    for (int b : adj[a]) {
      if (b <= static_cast<int>(a)) continue;
      common.clear();
      std::set_intersection(adj[a].begin(), adj[a].end(), adj[b].begin(), adj[b].end(), std::back_inserter(common));
      for (int c : common) {
        if (c > b) h.hyperedges.emplace_back(id(static_cast<int>(a)), id(b), id(c));
      }
    }
  }
  std::sort(h.hyperedges.begin(), h.hyperedges.end());
  return h;
}

SpatialGraph skeleton(const Hypergraph& h) {
  SpatialGraph g;
  g.nodes = h.nodes;
  for (const auto& e : h.hyperedges) {
    const auto ids = e.ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) g.edges.push_back({ids[i], ids[j]});
    }
  }
  g.canonicalize();
  return g;
}

}  // namespace hyperot
