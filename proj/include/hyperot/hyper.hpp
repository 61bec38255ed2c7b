#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperot/graph.hpp"

namespace hyperot {

/// Binary node s-adjacency matrix in sorted-id node order.
struct SAdjacency {
  int s = 1;
  std::vector<int> node_ids;
  std::vector<std::uint8_t> matrix;  // row-major n x n

  std::size_t size() const noexcept { return node_ids.size(); }
  bool at(std::size_t i, std::size_t j) const { return matrix[i * node_ids.size() + j] != 0; }
};

/// Per-node metric values aligned with the hypergraph's sorted node list.
struct PropertyVector {
  std::string name;
  int s = 0;  // 0 when the metric has no s parameter
  std::vector<int> node_ids;
  std::vector<double> values;
};

struct GraphProperties {
  std::size_t edge_count = 0;
  double avg_degree = 0.0;
  double avg_closeness = 0.0;
};

struct HypergraphProperties {
  std::size_t hyperedge_count = 0;
  std::size_t triangle_count = 0;
  double covered_area = 0.0;
  double avg_s_degree = 0.0;
  double avg_s_closeness = 0.0;
};

/// Number of hyperedges each node pair shares, for pairs sharing at least one.
/// Entries are ((dense_i, dense_j), count) with i < j, sorted.
std::vector<std::pair<std::array<int, 2>, int>> shared_hyperedge_counts(const Hypergraph& h);

/// A_s[i][j] = 1 iff nodes i != j share at least s hyperedges. Throws for s < 1.
SAdjacency s_adjacency(const Hypergraph& h, int s);

/// Graph generated by A_s; node positions carried over.
SpatialGraph s_line_graph(const Hypergraph& h, int s);

/// Harmonic closeness sum_{u != v, reachable} 1 / d(u, v) per node (BFS hop distances).
PropertyVector closeness(const SpatialGraph& g);

/// Count of incident hyperedges of size >= s per node.
PropertyVector s_degree(const Hypergraph& h, int s);

/// Closeness of each node inside L_s.
PropertyVector s_closeness(const Hypergraph& h, int s);

/// Sum of geometric areas of the size-3 hyperedges.
double covered_area(const Hypergraph& h);

GraphProperties graph_properties(const SpatialGraph& g);
HypergraphProperties hypergraph_properties(const Hypergraph& h, int s);

}  // namespace hyperot
