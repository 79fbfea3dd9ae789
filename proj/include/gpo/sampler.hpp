#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gpo/learners.hpp"
#include "gpo/problems.hpp"
#include "gpo/rng.hpp"

namespace gpo {

/// Unnormalized annealed target w_tau(s) = L(s) exp(-tau d(s)).
struct TargetSpec {
  ModelPtr base;
  CostOracle oracle;
  double tau = 0.0;
  double T = 0.0;
  double d_hat = 0.0;

  /// Throws BadRange unless 0 <= tau <= T and d_hat > 0, BadModel without a base.
  void validate() const;
};

struct WeightedPoint {
  double log_weight;
  double cost;
};

/// ln L(s) - tau d(s) together with d(s). Throws CostBoundExceeded when
/// d(s) > d_hat.
WeightedPoint evaluate(const TargetSpec& target, const Solution& s);
double log_weight(const TargetSpec& target, const Solution& s);

struct StepResult {
  Solution next;
  bool accepted;
};

/// One independent Metropolis-Hastings move with proposal q.
StepResult mh_step(const Solution& current, const GenerativeModel& proposal, const TargetSpec& target, Rng& rng);

struct ChainResult {
  Solution final_state;
  double cost_of_final = 0.0;
  std::int64_t accept_count = 0;
  std::int64_t steps = 0;
  double max_log_coverage_seen = 0.0;
  Solution best_state;  // lowest cost among all evaluated points, first wins
  double best_cost = 0.0;
  double start_cost = 0.0;
  std::int64_t oracle_calls = 0;
  std::vector<bool> decisions;  // filled when recording is requested
};

struct ChainOptions {
  std::optional<Solution> start;
  bool record_decisions = false;
};

/// M steps from start (or a fresh proposal draw). M = 0 returns the start.
ChainResult run_chain(const GenerativeModel& proposal, const TargetSpec& target, std::int64_t M, Rng& rng,
                      const ChainOptions& opts = {});

struct BatchResult {
  std::vector<Solution> finals;
  std::vector<double> final_costs;
  std::vector<double> start_costs;
  std::int64_t accept_count = 0;
  std::int64_t steps = 0;
  std::int64_t oracle_calls = 0;
  double max_log_coverage_seen = 0.0;
  Solution best_state;
  double best_cost = 0.0;

  double accept_rate() const { return steps > 0 ? static_cast<double>(accept_count) / static_cast<double>(steps) : 0.0; }
};

/// m independent chains of M steps; chain k uses the stream
/// (master_seed, stream_index, k), so results do not depend on threads.
BatchResult draw_batch(const GenerativeModel& proposal, const TargetSpec& target, std::int64_t m, std::int64_t M,
                       std::uint64_t master_seed, std::uint64_t stream_index, unsigned threads = 0);

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
/// The first exception thrown by any call is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace gpo
