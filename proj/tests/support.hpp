#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hyperot/graph.hpp"

namespace testsupport {

// G(n, p) on ids 0..n-1 with random positions.
inline hyperot::SpatialGraph random_graph(std::mt19937_64& rng, int n, double p) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  hyperot::SpatialGraph g;
  for (int i = 0; i < n; ++i) g.nodes.push_back({i, {unit(rng), unit(rng)}});
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (unit(rng) < p) g.edges.push_back({a, b});
    }
  }
  g.canonicalize();
  return g;
}

// Arbitrary hypergraph (not necessarily a lifted graph): random 2- and 3-sets.
inline hyperot::Hypergraph random_hypergraph(std::mt19937_64& rng, int n, int n_pairs, int n_triples) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, n - 1);
  hyperot::Hypergraph h;
  for (int i = 0; i < n; ++i) h.nodes.push_back({i, {unit(rng), unit(rng)}});
  for (int k = 0; k < n_pairs; ++k) {
    int a = pick(rng), b = pick(rng);
    if (a != b) h.hyperedges.emplace_back(a, b);
  }
  for (int k = 0; k < n_triples; ++k) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    if (a != b && b != c && a != c) h.hyperedges.emplace_back(a, b, c);
  }
  std::sort(h.hyperedges.begin(), h.hyperedges.end());
  h.hyperedges.erase(std::unique(h.hyperedges.begin(), h.hyperedges.end()), h.hyperedges.end());
  return h;
}

// All-pairs BFS distances on an adjacency matrix; -1 for unreachable.
inline std::vector<std::vector<int>> bfs_all_pairs(const std::vector<std::vector<bool>>& adj) {
  const std::size_t n = adj.size();
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> frontier{s};
    dist[s][s] = 0;
    for (int d = 1; !frontier.empty(); ++d) {
      std::vector<std::size_t> next;
      for (std::size_t u : frontier) {
        for (std::size_t v = 0; v < n; ++v) {
          if (adj[u][v] && dist[s][v] < 0) {
            dist[s][v] = d;
            next.push_back(v);
          }
        }
      }
      frontier.swap(next);
    }
  }
  return dist;
}

inline std::vector<double> harmonic_closeness(const std::vector<std::vector<bool>>& adj) {
  const auto dist = bfs_all_pairs(adj);
  std::vector<double> out(adj.size(), 0.0);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (std::size_t j = 0; j < adj.size(); ++j) {
      if (i != j && dist[i][j] > 0) out[i] += 1.0 / dist[i][j];
    }
  }
  return out;
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hyperot_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
