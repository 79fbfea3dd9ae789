#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gpo/graph.hpp"
#include "gpo/learners.hpp"
#include "gpo/problems.hpp"
#include "gpo/rng.hpp"
#include "gpo/sampler.hpp"

namespace gpo {

struct AnnealConfig {
  std::int64_t m = 4;
  std::int64_t M = 0;          // 0 selects m^2, or m^3 with cubic_chain
  bool cubic_chain = false;
  double T = 1.0;
  double d_hat = 1.0;
  LearnerSettings learner;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool timing = false;         // wall_ms stays 0 unless set

  std::int64_t chain_length() const;
  /// Temperatures 1/D_hat, 2/D_hat, ... up to T.
  std::vector<double> schedule() const;
  void validate() const;
};

struct TopiftConfig {
  std::int64_t m = 4;
  std::int64_t M = 12;
  std::int64_t Q = 8;
  LearnerSettings learner;
  std::uint64_t seed = 0;
  bool softmin = false;
  double tau_r = 0.0;          // soft-min temperature; 0 selects ln M / D_hat
  bool stop_at_zero = false;
  bool timing = false;

  void validate() const;
};

struct TraceRecord {
  std::string phase;           // "temperature" or "round"
  std::int64_t index = 0;
  double tau_or_round = 0.0;
  double batch_min = 0, batch_med = 0, batch_max = 0;
  double elite_min = 0, elite_med = 0, elite_max = 0;
  double accept_rate = 0.0;
  double best_cost = 0.0;      // best so far, non-increasing
  std::int64_t oracle_calls = 0;  // cumulative
  double wall_ms = 0.0;

  // Full cost lists; not part of the CSV row.
  std::vector<double> batch_costs;
  std::vector<double> elite_costs;
};

struct RunTrace {
  std::vector<TraceRecord> records;
  Solution best_state;
  double best_cost = 0.0;
  std::int64_t oracle_calls = 0;
};

struct CostSummary {
  double min = 0, med = 0, max = 0;
};

/// Median averages the two middle values for even counts. Empty input gives zeros.
CostSummary summarize(std::vector<double> costs);

inline constexpr const char* kTraceHeader =
    "phase,index,tau_or_round,batch_min,batch_med,batch_max,elite_min,elite_med,elite_max,accept_rate,best_cost,"
    "oracle_calls,wall_ms";

void write_trace_csv(std::ostream& out, const RunTrace& trace);
/// Throws SchemaMismatch on a different header, ParseError on bad rows.
RunTrace read_trace_csv(std::istream& in);

/// Long-format per-sample costs: phase,index,series,cost.
void write_cost_csv(std::ostream& out, const RunTrace& trace);

struct DriverResult {
  ModelPtr model;
  RunTrace trace;
  std::vector<Solution> samples;  // S_T, or the last elite set
};

DriverResult aldrift(const AnnealConfig& cfg, const ModelPtr& base, const CostOracle& oracle);
DriverResult topift(const TopiftConfig& cfg, const ModelPtr& base, const CostOracle& oracle);

/// Keeps each sample independently with probability exp(-tau_r * cost).
std::vector<Solution> soft_min_select(const std::vector<std::pair<Solution, double>>& batch, double tau_r, Rng& rng);

/// Indices of the m smallest costs, stable by position.
std::vector<std::size_t> elite_indices(const std::vector<double>& costs, std::size_t m);

std::pair<Solution, double> best_of_model(const GenerativeModel& model, const CostOracle& oracle, std::int64_t N,
                                          Rng& rng);

using FeasibleSampler = std::function<Solution(Rng&)>;

/// Feasible draw with the largest base log-density, first wins. Throws
/// InfeasibleDraw if a draw has nonzero cost.
std::pair<Solution, double> best_of_alg(const FeasibleSampler& sampler, const CostOracle& oracle,
                                        const GenerativeModel& base, std::int64_t N, Rng& rng);

/// Kruskal over a shuffled edge order. Throws Disconnected.
Solution random_spanning_tree(const Graph& g, Rng& rng);

/// Acyclic edge subset with every degree <= 2, grown by shuffled greedy
/// insertion until it has target_edges edges or no edge fits.
Solution random_linear_forest(const Graph& g, int target_edges, Rng& rng);

/// Model fitted on `count` linear forests with sizes uniform in [n/2, n-2].
ModelPtr forest_base_model(const Graph& g, int count, const LearnerSettings& settings, std::uint64_t seed);

}  // namespace gpo
