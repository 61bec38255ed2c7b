#include "hyperot/graph.hpp"

#include <algorithm>

#include "hyperot/errors.hpp"

namespace hyperot {

Hyperedge::Hyperedge(int a, int b) : size_(2) {
  if (a == b) throw ConfigError("hyperedge", "repeated node id");
  ids_ = {std::min(a, b), std::max(a, b), -1};
}

Hyperedge::Hyperedge(int a, int b, int c) : size_(3) {
  ids_ = {a, b, c};
  std::sort(ids_.begin(), ids_.end());
  if (ids_[0] == ids_[1] || ids_[1] == ids_[2]) throw ConfigError("hyperedge", "repeated node id");
}

bool operator<(const Hyperedge& a, const Hyperedge& b) {
  const auto x = a.ids();
  const auto y = b.ids();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

std::size_t Hypergraph::triangle_count() const {
  return static_cast<std::size_t>(
      std::count_if(hyperedges.begin(), hyperedges.end(), [](const Hyperedge& e) { return e.size() == 3; }));
}

void SpatialGraph::canonicalize() {
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  nodes.erase(std::unique(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id == b.id; }),
              nodes.end());
  for (auto& e : edges) {
    if (e[0] > e[1]) std::swap(e[0], e[1]);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void SpatialGraph::validate() const {
  NodeIndex index(nodes);
  for (const auto& e : edges) {
    if (e[0] == e[1]) throw ConfigError("edges", "self-loop on node " + std::to_string(e[0]));
    if (index(e[0]) < 0 || index(e[1]) < 0) throw ConfigError("edges", "endpoint not in node set");
  }
}

NodeIndex::NodeIndex(std::span<const Node> nodes) : n_(nodes.size()) {
  ids_.reserve(nodes.size());
  for (const auto& n : nodes) ids_.push_back(n.id);
  if (!std::is_sorted(ids_.begin(), ids_.end())) std::sort(ids_.begin(), ids_.end());
}

int NodeIndex::operator()(int id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return -1;
  return static_cast<int>(it - ids_.begin());
}

std::vector<std::vector<int>> adjacency_lists(const SpatialGraph& g) {
  NodeIndex index(g.nodes);
  std::vector<std::vector<int>> adj(g.nodes.size());
  for (const auto& e : g.edges) {
    const int a = index(e[0]);
    const int b = index(e[1]);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

namespace {

nlohmann::json nodes_json(const std::vector<Node>& nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& n : nodes) out.push_back({{"id", n.id}, {"x", n.pos.x}, {"y", n.pos.y}});
  return out;
}

}  // namespace

nlohmann::json to_json(const SpatialGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({e[0], e[1]});
  return {{"nodes", nodes_json(g.nodes)}, {"edges", std::move(edges)}};
}

nlohmann::json to_json(const Hypergraph& h) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : h.hyperedges) {
    auto ids = e.ids();
    edges.push_back(std::vector<int>(ids.begin(), ids.end()));
  }
  return {{"nodes", nodes_json(h.nodes)}, {"hyperedges", std::move(edges)}};
}

Hypergraph hypergraph_from_json(const nlohmann::json& j) {
  Hypergraph h;
  for (const auto& n : j.at("nodes")) {
    h.nodes.push_back({n.at("id").get<int>(), {n.at("x").get<double>(), n.at("y").get<double>()}});
  }
  for (const auto& e : j.at("hyperedges")) {
    if (e.size() == 2) {
      h.hyperedges.emplace_back(e[0].get<int>(), e[1].get<int>());
    } else if (e.size() == 3) {
      h.hyperedges.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<int>());
    } else {
      throw ConfigError("hyperedges", "hyperedge size must be 2 or 3");
    }
  }
  std::sort(h.nodes.begin(), h.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  std::sort(h.hyperedges.begin(), h.hyperedges.end());
  h.hyperedges.erase(std::unique(h.hyperedges.begin(), h.hyperedges.end()), h.hyperedges.end());
  return h;
}

}  // namespace hyperot
