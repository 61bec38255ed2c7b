#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperot/geometry.hpp"

namespace hyperot {

struct Node {
  int id = 0;
  Point2 pos;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected simple graph with positioned nodes.
///
/// Canonical form: nodes sorted by id, edges stored as (a, b) with a < b,
/// sorted and unique. Graph-producing functions in this library always
/// return canonical graphs; `canonicalize()` repairs hand-built ones.
struct SpatialGraph {
  std::vector<Node> nodes;
  std::vector<std::array<int, 2>> edges;

  void canonicalize();
  /// Throws ConfigError on self-loops or dangling endpoints.
  void validate() const;

  friend bool operator==(const SpatialGraph&, const SpatialGraph&) = default;
};

/// Hyperedge of size 2 or 3 with ascending ids.
class Hyperedge {
 public:
  Hyperedge(int a, int b);
  Hyperedge(int a, int b, int c);

  std::size_t size() const noexcept { return size_; }
  std::span<const int> ids() const noexcept { return {ids_.data(), size_}; }
  int operator[](std::size_t i) const { return ids_[i]; }

  friend bool operator==(const Hyperedge& a, const Hyperedge& b) {
    return a.size_ == b.size_ && a.ids_ == b.ids_;
  }
  /// Lexicographic on the id sequence, so [0,1] < [0,1,2] < [0,2].
  friend bool operator<(const Hyperedge& a, const Hyperedge& b);

 private:
  std::array<int, 3> ids_{-1, -1, -1};
  std::size_t size_ = 0;
};

struct Hypergraph {
  std::vector<Node> nodes;  // sorted by id
  std::vector<Hyperedge> hyperedges;  // sorted, unique

  std::size_t triangle_count() const;
  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;
};

/// Maps node ids to dense positions [0, n) following the sorted node order.
class NodeIndex {
 public:
  explicit NodeIndex(std::span<const Node> nodes);
  /// Dense index of `id`, or -1 if absent.
  int operator()(int id) const;
  std::size_t size() const noexcept { return n_; }

 private:
  std::vector<int> ids_;
  std::size_t n_ = 0;
};

/// Neighbor lists (dense indices, ascending) of a canonical graph.
std::vector<std::vector<int>> adjacency_lists(const SpatialGraph& g);

nlohmann::json to_json(const SpatialGraph& g);
/// Canonical hypergraph JSON: {nodes: [{id, x, y}], hyperedges: [[i,j], [i,j,k], ...]}.
nlohmann::json to_json(const Hypergraph& h);
Hypergraph hypergraph_from_json(const nlohmann::json& j);

}  // namespace hyperot
