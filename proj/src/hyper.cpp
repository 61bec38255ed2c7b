#include "hyperot/hyper.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "hyperot/errors.hpp"

namespace hyperot {
namespace {

void require_s(int s) {
  if (s < 1) throw ConfigError("s", "must be >= 1");
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<int> ids_of(const std::vector<Node>& nodes) {
  std::vector<int> ids;
  ids.reserve(nodes.size());
  for (const auto& n : nodes) ids.push_back(n.id);
  return ids;
}

}  // namespace

std::vector<std::pair<std::array<int, 2>, int>> shared_hyperedge_counts(const Hypergraph& h) {
  NodeIndex index(h.nodes);
  std::vector<std::array<int, 2>> pairs;
  pairs.reserve(3 * h.hyperedges.size());
  for (const auto& e : h.hyperedges) {
    const auto ids = e.ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const int a = index(ids[i]);
        const int b = index(ids[j]);
        if (a < 0 || b < 0) throw ConfigError("hyperedges", "references a node outside the node set");
        pairs.push_back({std::min(a, b), std::max(a, b)});
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());

  std::vector<std::pair<std::array<int, 2>, int>> counts;
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    counts.push_back({pairs[i], static_cast<int>(j - i)});
    i = j;
  }
  return counts;
}

SAdjacency s_adjacency(const Hypergraph& h, int s) {
  require_s(s);
  SAdjacency a;
  a.s = s;
  a.node_ids = ids_of(h.nodes);
  const std::size_t n = a.node_ids.size();
  a.matrix.assign(n * n, 0);
  for (const auto& [pair, count] : shared_hyperedge_counts(h)) {
    if (count >= s) {
      a.matrix[pair[0] * n + pair[1]] = 1;
      a.matrix[pair[1] * n + pair[0]] = 1;
    }
  }
  return a;
}

SpatialGraph s_line_graph(const Hypergraph& h, int s) {
  require_s(s);
  SpatialGraph g;
  g.nodes = h.nodes;
  for (const auto& [pair, count] : shared_hyperedge_counts(h)) {
    if (count >= s) g.edges.push_back({h.nodes[pair[0]].id, h.nodes[pair[1]].id});
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

PropertyVector closeness(const SpatialGraph& g) {
  const auto adj = adjacency_lists(g);
  const std::size_t n = adj.size();
  PropertyVector out{"closeness", 0, ids_of(g.nodes), std::vector<double>(n, 0.0)};

  std::vector<int> dist(n);
  std::vector<int> queue(n);
  for (std::size_t src = 0; src < n; ++src) {
    if (adj[src].empty()) continue;
    std::fill(dist.begin(), dist.end(), -1);
    dist[src] = 0;
    std::size_t head = 0;
    std::size_t tail = 0;
    queue[tail++] = static_cast<int>(src);
    double sum = 0.0;
    while (head < tail) {
      const int v = queue[head++];
      for (int w : adj[v]) {
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        sum += 1.0 / dist[w];
        queue[tail++] = w;
      }
    }
    out.values[src] = sum;
  }
  return out;
}

PropertyVector s_degree(const Hypergraph& h, int s) {
  require_s(s);
  NodeIndex index(h.nodes);
  PropertyVector out{"s_degree", s, ids_of(h.nodes), std::vector<double>(h.nodes.size(), 0.0)};
  for (const auto& e : h.hyperedges) {
    if (static_cast<int>(e.size()) < s) continue;
    for (int id : e.ids()) {
      const int i = index(id);
      if (i < 0) throw ConfigError("hyperedges", "references a node outside the node set");
      out.values[i] += 1.0;
    }
  }
  return out;
}

PropertyVector s_closeness(const Hypergraph& h, int s) {
  PropertyVector out = closeness(s_line_graph(h, s));
  out.name = "s_closeness";
  out.s = s;
  return out;
}

double covered_area(const Hypergraph& h) {
  NodeIndex index(h.nodes);
  double area = 0.0;
  for (const auto& e : h.hyperedges) {
    if (e.size() != 3) continue;
    const int a = index(e[0]);
    const int b = index(e[1]);
    const int c = index(e[2]);
    if (a < 0 || b < 0 || c < 0) throw ConfigError("hyperedges", "references a node outside the node set");
    area += triangle_area(h.nodes[a].pos, h.nodes[b].pos, h.nodes[c].pos);
  }
  return area;
}

GraphProperties graph_properties(const SpatialGraph& g) {
  GraphProperties p;
  if (g.nodes.empty()) return p;
  p.edge_count = g.edges.size();
  p.avg_degree = 2.0 * static_cast<double>(g.edges.size()) / static_cast<double>(g.nodes.size());
  p.avg_closeness = mean(closeness(g).values);
  return p;
}

HypergraphProperties hypergraph_properties(const Hypergraph& h, int s) {
  require_s(s);
  HypergraphProperties p;
  p.hyperedge_count = h.hyperedges.size();
  p.triangle_count = h.triangle_count();
  p.covered_area = covered_area(h);
  p.avg_s_degree = mean(s_degree(h, s).values);
  p.avg_s_closeness = mean(s_closeness(h, s).values);
  return p;
}

}  // namespace hyperot
