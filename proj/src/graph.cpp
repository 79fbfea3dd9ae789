#include "gpo/graph.hpp"

#include <algorithm>
#include <string>

#include "gpo/errors.hpp"

namespace gpo {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw Error(ErrorCode::BadInstance, "graph needs at least one vertex");
  for (auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) {
      throw Error(ErrorCode::BadInstance,
                  "edge (" + std::to_string(u) + "," + std::to_string(v) + ") outside vertex range");
    }
    if (u == v) throw Error(ErrorCode::BadInstance, "self-loop at vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
    throw Error(ErrorCode::BadInstance, "duplicate edge");
  }
}

std::optional<std::size_t> Graph::edge_index(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v});
  if (it == edges_.end() || *it != Edge{u, v}) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

SolutionSpace Graph::subset_space() const {
  return SolutionSpace(std::vector<std::size_t>(edges_.size(), 2), EncodingKind::edge_subset);
}

UnionFind::UnionFind(int n) : parent_(n), size_(n, 1), components_(n) {
  for (int i = 0; i < n; ++i) parent_[i] = i;
}

int UnionFind::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  --components_;
  return true;
}

Solution encode_edge_subset(const std::vector<Edge>& subset, const Graph& g) {
  std::vector<Token> t(g.num_edges(), 0);
  for (const auto& [u, v] : subset) {
    auto idx = g.edge_index(u, v);
    if (!idx) {
      throw Error(ErrorCode::UnknownEdge, "edge (" + std::to_string(u) + "," + std::to_string(v) + ") not in graph");
    }
    t[*idx] = 1;
  }
  return Solution(std::move(t));
}

std::vector<Edge> decode_edge_subset(const Solution& s, const Graph& g) {
  if (s.size() != g.num_edges()) {
    throw Error(ErrorCode::EncodingMismatch, "subset length " + std::to_string(s.size()) + " != edge count " +
                                                 std::to_string(g.num_edges()));
  }
  std::vector<Edge> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.tokens[i] != 0) out.push_back(g.edge(i));
  }
  return out;
}

}  // namespace gpo
