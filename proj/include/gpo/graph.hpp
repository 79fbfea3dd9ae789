#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gpo/solution_space.hpp"

namespace gpo {

using Edge = std::pair<int, int>;

/// Simple undirected graph. Edges are stored as (min, max) pairs sorted
/// lexicographically; that order defines token positions in edge-subset
/// encodings.
class Graph {
 public:
  /// Normalizes and sorts edges. Throws BadInstance on self-loops,
  /// duplicates or out-of-range vertices.
  Graph(int n, std::vector<Edge> edges);

  int num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }

  /// Canonical position of edge {u, v}, if present.
  std::optional<std::size_t> edge_index(int u, int v) const;

  SolutionSpace subset_space() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_;
  std::vector<Edge> edges_;
};

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(int n);
  int find(int x);
  bool unite(int a, int b);
  int components() const noexcept { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  int components_;
};

Solution encode_edge_subset(const std::vector<Edge>& subset, const Graph& g);
std::vector<Edge> decode_edge_subset(const Solution& s, const Graph& g);

}  // namespace gpo
