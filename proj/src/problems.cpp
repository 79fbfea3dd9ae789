#include "gpo/problems.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "gpo/errors.hpp"
#include "gpo/rng.hpp"

namespace gpo {

void SchedulingInstance::validate() const {
  if (K < 1) throw Error(ErrorCode::BadInstance, "K must be positive");
  const auto k = static_cast<std::size_t>(K);
  if (travel.size() != k - 1 || open.size() != k || lower.size() != k || upper.size() != k) {
    throw Error(ErrorCode::BadInstance, "vector lengths inconsistent with K=" + std::to_string(K));
  }
  if (open[0] != 0) throw Error(ErrorCode::BadInstance, "first opening time must be 0");
  for (std::size_t i = 0; i < k; ++i) {
    if (lower[i] > upper[i]) throw Error(ErrorCode::BadInstance, "lower > upper at station " + std::to_string(i + 1));
    if (lower[i] < 0 || open[i] < 0) throw Error(ErrorCode::BadInstance, "negative entry");
  }
  for (int t : travel) {
    if (t < 0) throw Error(ErrorCode::BadInstance, "negative travel time");
  }
}

std::vector<int> opening_times(std::span<const int> travel, std::span<const int> upper) {
  std::vector<int> open(upper.size(), 0);
  for (std::size_t i = 1; i < upper.size(); ++i) open[i] = open[i - 1] + travel[i - 1] + upper[i];
  return open;
}

SchedulingInstance make_scheduling_instance(std::vector<int> travel, std::vector<int> lower,
                                            std::vector<int> upper) {
  SchedulingInstance inst;
  inst.K = static_cast<int>(upper.size());
  if (travel.size() + 1 != upper.size()) {
    throw Error(ErrorCode::BadInstance, "travel must have K-1 entries");
  }
  inst.open = opening_times(travel, upper);
  inst.travel = std::move(travel);
  inst.lower = std::move(lower);
  inst.upper = std::move(upper);
  inst.validate();
  return inst;
}

SchedulingInstance fixed_scheduling_instance(int K, int travel, int lower, int upper) {
  if (K < 1) throw Error(ErrorCode::BadRange, "K must be positive");
  return make_scheduling_instance(std::vector<int>(K - 1, travel), std::vector<int>(K, lower),
                                  std::vector<int>(K, upper));
}

SchedulingInstance gen_scheduling_instance(std::uint64_t seed, int K, int lo, int hi) {
  if (K < 1) throw Error(ErrorCode::BadRange, "K must be positive");
  if (lo < 1 || lo > hi) throw Error(ErrorCode::BadRange, "value range must satisfy 1 <= lo <= hi");
  Rng rng = make_stream(seed, {0x5C4Du});
  std::uniform_int_distribution<int> draw(lo, hi);
  std::vector<int> travel(K - 1), lower(K), upper(K);
  for (auto& t : travel) t = draw(rng);
  for (int i = 0; i < K; ++i) {
    int a = draw(rng);
    int b = draw(rng);
    if (a > b) std::swap(a, b);
    lower[i] = a;
    upper[i] = b;
  }
  return make_scheduling_instance(std::move(travel), std::move(lower), std::move(upper));
}

std::int64_t wait_time(const SchedulingInstance& inst, std::span<const int> v) {
  if (v.size() != static_cast<std::size_t>(inst.K)) {
    throw Error(ErrorCode::DimensionMismatch, "duration vector has " + std::to_string(v.size()) +
                                                  " entries, instance has K=" + std::to_string(inst.K));
  }
  std::int64_t arrival = 0;
  std::int64_t wait = 0;
  std::int64_t total = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    arrival = arrival + wait + v[i - 1] + inst.travel[i - 1];
    wait = std::max<std::int64_t>(0, inst.open[i] - arrival);
    total += wait;
  }
  return total;
}

std::int64_t visit_violation(const SchedulingInstance& inst, std::span<const int> v) {
  if (v.size() != static_cast<std::size_t>(inst.K)) {
    throw Error(ErrorCode::DimensionMismatch, "duration vector length does not match K");
  }
  std::int64_t total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    total += std::max({0, inst.lower[i] - v[i], v[i] - inst.upper[i]});
  }
  return total;
}

namespace {

void check_subset(const Graph& g, const Solution& subset) {
  if (subset.size() != g.num_edges()) {
    throw Error(ErrorCode::EncodingMismatch, "subset length " + std::to_string(subset.size()) +
                                                 " != edge count " + std::to_string(g.num_edges()));
  }
}

}  // namespace

int tree_cost(const Graph& g, const Solution& subset) {
  check_subset(g, subset);
  UnionFind uf(g.num_vertices());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset.tokens[i] != 0) uf.unite(g.edge(i).first, g.edge(i).second);
  }
  return uf.components() - 1;
}

int degree_violation(const Graph& g, const Solution& subset) {
  check_subset(g, subset);
  std::vector<int> deg(g.num_vertices(), 0);
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset.tokens[i] != 0) {
      ++deg[g.edge(i).first];
      ++deg[g.edge(i).second];
    }
  }
  return static_cast<int>(std::count_if(deg.begin(), deg.end(), [](int d) { return d >= 3; }));
}

Graph gen_planted_graph(std::uint64_t seed, int n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadProbability, "edge probability must lie in [0,1]");
  if (n < 2) throw Error(ErrorCode::BadRange, "planted graph needs n >= 2");
  Rng rng = make_stream(seed, {0x6A7Bu});
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      bool drawn = coin(rng);  // drawn for every pair so the stream layout is fixed
      if (v == u + 1 || drawn) edges.emplace_back(u, v);
    }
  }
  return Graph(n, std::move(edges));
}

CostOracle::CostOracle(std::string name, Fn fn, double upper_bound)
    : name_(std::move(name)), fn_(std::move(fn)), upper_bound_(upper_bound) {
  if (!(upper_bound_ >= 0.0)) throw Error(ErrorCode::BadRange, "cost upper bound must be non-negative");
}

SolutionSpace duration_space(int K, int min_value, int max_value) {
  if (K < 1 || max_value < min_value) throw Error(ErrorCode::BadRange, "bad duration space");
  return SolutionSpace(std::vector<std::size_t>(K, static_cast<std::size_t>(max_value - min_value + 1)),
                       EncodingKind::duration_vector);
}

CostOracle scheduling_oracle(const SchedulingInstance& inst, int min_value, double upper_bound) {
  inst.validate();
  if (upper_bound <= 0.0) {
    upper_bound = static_cast<double>(std::accumulate(inst.open.begin(), inst.open.end(), std::int64_t{0}));
  }
  return CostOracle(
      "wait_time",
      [inst, min_value](const Solution& s) {
        auto v = decode_durations(s, min_value);
        return static_cast<double>(wait_time(inst, v));
      },
      upper_bound);
}

CostOracle spanning_tree_oracle(const Graph& g) {
  return CostOracle(
      "tree_cost", [g](const Solution& s) { return static_cast<double>(tree_cost(g, s)); },
      static_cast<double>(g.num_vertices() - 1));
}

CostOracle hamming_oracle(Solution target) {
  const double bound = static_cast<double>(target.size());
  return CostOracle(
      "hamming",
      [target = std::move(target)](const Solution& s) {
        if (s.size() != target.size()) throw Error(ErrorCode::DimensionMismatch, "hamming: length mismatch");
        int d = 0;
        for (std::size_t i = 0; i < s.size(); ++i) d += s.tokens[i] != target.tokens[i];
        return static_cast<double>(d);
      },
      bound);
}

}  // namespace gpo
