#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpo/graph.hpp"
#include "gpo/solution_space.hpp"

namespace gpo {

/// Line-scheduling instance: K stations, travel times between consecutive
/// stations, opening times and per-station visit-duration bounds.
struct SchedulingInstance {
  int K = 0;
  std::vector<int> travel;  // K-1 entries
  std::vector<int> open;    // K entries, open[0] == 0
  std::vector<int> lower;   // K entries
  std::vector<int> upper;   // K entries

  /// Throws BadInstance if lengths, ordering or signs are inconsistent.
  void validate() const;

  friend bool operator==(const SchedulingInstance&, const SchedulingInstance&) = default;
};

/// Opening times from o_1 = 0, o_i = o_{i-1} + t_{i-1} + u_i.
std::vector<int> opening_times(std::span<const int> travel, std::span<const int> upper);

SchedulingInstance make_scheduling_instance(std::vector<int> travel, std::vector<int> lower,
                                            std::vector<int> upper);

/// The benchmark instance with constant travel and bounds (K=10, t=10, [1,20] by default).
SchedulingInstance fixed_scheduling_instance(int K = 10, int travel = 10, int lower = 1, int upper = 20);

/// Draws t_i, l_i, u_i uniformly from [lo, hi]; l_i and u_i are swapped when
/// out of order. Deterministic per seed.
SchedulingInstance gen_scheduling_instance(std::uint64_t seed, int K, int lo, int hi);

/// Total waiting time under forward simulation. Durations outside the
/// visit bounds are scored, not rejected.
std::int64_t wait_time(const SchedulingInstance& inst, std::span<const int> durations);

/// Sum over stations of the distance from v_i to [l_i, u_i].
std::int64_t visit_violation(const SchedulingInstance& inst, std::span<const int> durations);

/// Number of connected components induced by the selected edges, minus one.
int tree_cost(const Graph& g, const Solution& subset);

/// Number of vertices whose induced degree is at least 3.
int degree_violation(const Graph& g, const Solution& subset);

/// Path edges (i, i+1) plus every other pair independently with probability p.
Graph gen_planted_graph(std::uint64_t seed, int n, double p);

/// Zeroth-order cost d(.) with a declared upper bound D_hat >= max d.
class CostOracle {
 public:
  using Fn = std::function<double(const Solution&)>;

  CostOracle(std::string name, Fn fn, double upper_bound);

  double operator()(const Solution& s) const { return fn_(s); }
  double upper_bound() const noexcept { return upper_bound_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  Fn fn_;
  double upper_bound_;
};

/// Space of duration vectors with tokens v - min_value, alphabet per station.
SolutionSpace duration_space(int K, int min_value, int max_value);

/// Wait-time oracle over duration tokens. D_hat defaults to sum of opening
/// times when upper_bound <= 0.
CostOracle scheduling_oracle(const SchedulingInstance& inst, int min_value, double upper_bound = 0.0);

/// Tree-cost oracle over edge-subset tokens; D_hat = n - 1.
CostOracle spanning_tree_oracle(const Graph& g);

/// Hamming distance to a fixed target; D_hat = number of positions.
CostOracle hamming_oracle(Solution target);

// Instance files. Writers emit the canonical form; readers accept it back
// exactly, so write(read(x)) reproduces a canonical file byte for byte.
void write_scheduling_instance(std::ostream& out, const SchedulingInstance& inst);
SchedulingInstance read_scheduling_instance(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);
Graph read_graph(std::istream& in);

}  // namespace gpo
