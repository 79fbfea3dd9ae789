#include "gpo/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "gpo/errors.hpp"
#include "gpo/text.hpp"

namespace gpo {

namespace {

constexpr std::uint64_t kRoundStream = 0x70F7;
constexpr std::uint64_t kKeepStream = 0x50F7;
constexpr int kSoftMinRetries = 5;
constexpr double kScheduleSlack = 1e-9;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void fill_stats(TraceRecord& r) {
  const auto b = summarize(r.batch_costs);
  const auto e = summarize(r.elite_costs);
  r.batch_min = b.min, r.batch_med = b.med, r.batch_max = b.max;
  r.elite_min = e.min, r.elite_med = e.med, r.elite_max = e.max;
}

ModelPtr refit_from(const LearnerSettings& settings, const std::vector<Solution>& samples, const SolutionSpace& space,
                    const ModelPtr& previous) {
  return refit(settings, samples, space, settings.fit.lambda > 0.0 ? previous : nullptr);
}

}  // namespace

CostSummary summarize(std::vector<double> costs) {
  if (costs.empty()) return {};
  std::sort(costs.begin(), costs.end());
  const std::size_t n = costs.size();
  const double med = n % 2 ? costs[n / 2] : 0.5 * (costs[n / 2 - 1] + costs[n / 2]);
  return {costs.front(), med, costs.back()};
}

// ---------------------------------------------------------------- configs

std::int64_t AnnealConfig::chain_length() const {
  if (M > 0) return M;
  return cubic_chain ? m * m * m : m * m;
}

std::vector<double> AnnealConfig::schedule() const {
  const auto steps = static_cast<std::int64_t>(std::floor(T * d_hat + kScheduleSlack));
  std::vector<double> taus;
  for (std::int64_t k = 1; k <= steps; ++k) taus.push_back(static_cast<double>(k) / d_hat);
  return taus;
}

void AnnealConfig::validate() const {
  if (m < 1) throw Error(ErrorCode::BadRange, "m must be >= 1");
  if (M < 0) throw Error(ErrorCode::BadRange, "M must be >= 1");
  if (!(T > 0.0)) throw Error(ErrorCode::BadRange, "T must be positive");
  if (!(d_hat > 0.0)) throw Error(ErrorCode::BadRange, "D_hat must be positive");
  if (schedule().empty()) throw Error(ErrorCode::ScheduleEmpty, "T is smaller than one temperature step 1/D_hat");
}

void TopiftConfig::validate() const {
  if (m < 1 || M < 1 || Q < 1) throw Error(ErrorCode::BadRange, "m, M and Q must be >= 1");
  if (tau_r < 0.0) throw Error(ErrorCode::BadRange, "soft-min temperature must be non-negative");
}

// ---------------------------------------------------------------- trace io

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  using text::format_double;
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.phase << ',' << r.index << ',' << format_double(r.tau_or_round) << ',' << format_double(r.batch_min)
        << ',' << format_double(r.batch_med) << ',' << format_double(r.batch_max) << ','
        << format_double(r.elite_min) << ',' << format_double(r.elite_med) << ',' << format_double(r.elite_max)
        << ',' << format_double(r.accept_rate) << ',' << format_double(r.best_cost) << ',' << r.oracle_calls << ','
        << format_double(r.wall_ms) << '\n';
  }
}

RunTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kTraceHeader) {
    throw Error(ErrorCode::SchemaMismatch, "trace header does not match the expected columns");
  }
  RunTrace trace;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(text::trim(line), ',');
    if (f.size() != 13) {
      throw Error(ErrorCode::ParseError, "trace line " + std::to_string(lineno) + ": expected 13 fields");
    }
    TraceRecord r;
    try {
      r.phase = std::string(f[0]);
      r.index = text::parse_int(f[1]);
      r.tau_or_round = text::parse_double(f[2]);
      r.batch_min = text::parse_double(f[3]);
      r.batch_med = text::parse_double(f[4]);
      r.batch_max = text::parse_double(f[5]);
      r.elite_min = text::parse_double(f[6]);
      r.elite_med = text::parse_double(f[7]);
      r.elite_max = text::parse_double(f[8]);
      r.accept_rate = text::parse_double(f[9]);
      r.best_cost = text::parse_double(f[10]);
      r.oracle_calls = text::parse_int(f[11]);
      r.wall_ms = text::parse_double(f[12]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "trace line " + std::to_string(lineno) + ": " + e.what());
    }
    trace.records.push_back(std::move(r));
  }
  if (!trace.records.empty()) {
    trace.best_cost = trace.records.back().best_cost;
    trace.oracle_calls = trace.records.back().oracle_calls;
  }
  return trace;
}

void write_cost_csv(std::ostream& out, const RunTrace& trace) {
  out << "phase,index,series,cost\n";
  for (const auto& r : trace.records) {
    for (double c : r.batch_costs) out << r.phase << ',' << r.index << ",batch," << text::format_double(c) << '\n';
    for (double c : r.elite_costs) out << r.phase << ',' << r.index << ",elite," << text::format_double(c) << '\n';
  }
}

// ---------------------------------------------------------------- ALDrIFT

DriverResult aldrift(const AnnealConfig& cfg, const ModelPtr& base, const CostOracle& oracle) {
  cfg.validate();
  if (!base) throw Error(ErrorCode::BadModel, "no base model");
  const auto start = Clock::now();
  const std::int64_t M = cfg.chain_length();
  const auto& space = base->space();

  DriverResult result;
  ModelPtr current = base;
  const auto taus = cfg.schedule();
  for (std::size_t k = 0; k < taus.size(); ++k) {
    TargetSpec target{base, oracle, taus[k], taus.back(), cfg.d_hat};
    auto batch = draw_batch(*current, target, cfg.m, M, cfg.seed, k + 1, cfg.threads);

    auto& trace = result.trace;
    trace.oracle_calls += batch.oracle_calls;
    if (k == 0 || batch.best_cost < trace.best_cost) {
      trace.best_cost = batch.best_cost;
      trace.best_state = batch.best_state;
    }
    current = refit_from(cfg.learner, batch.finals, space, current);

    TraceRecord r;
    r.phase = "temperature";
    r.index = static_cast<std::int64_t>(k + 1);
    r.tau_or_round = taus[k];
    r.batch_costs = std::move(batch.start_costs);
    r.elite_costs = std::move(batch.final_costs);
    fill_stats(r);
    r.accept_rate = batch.accept_rate();
    r.best_cost = trace.best_cost;
    r.oracle_calls = trace.oracle_calls;
    r.wall_ms = cfg.timing ? elapsed_ms(start) : 0.0;
    trace.records.push_back(std::move(r));
    result.samples = std::move(batch.finals);
  }
  result.model = current;
  return result;
}

// ---------------------------------------------------------------- TopIFT

std::vector<std::size_t> elite_indices(const std::vector<double>& costs, std::size_t m) {
  std::vector<std::size_t> idx(costs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
  idx.resize(std::min(m, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Solution> soft_min_select(const std::vector<std::pair<Solution, double>>& batch, double tau_r, Rng& rng) {
  if (!(tau_r >= 0.0)) throw Error(ErrorCode::BadRange, "soft-min temperature must be non-negative");
  std::vector<Solution> kept;
  for (const auto& [s, cost] : batch) {
    if (std::log(uniform_open(rng)) <= -tau_r * cost) kept.push_back(s);
  }
  return kept;
}

DriverResult topift(const TopiftConfig& cfg, const ModelPtr& base, const CostOracle& oracle) {
  cfg.validate();
  if (!base) throw Error(ErrorCode::BadModel, "no base model");
  const auto start = Clock::now();
  const auto& space = base->space();
  const std::int64_t batch_size = cfg.m * cfg.M;
  double tau_r = cfg.tau_r;
  if (cfg.softmin && tau_r == 0.0) {
    if (!(oracle.upper_bound() > 0.0)) throw Error(ErrorCode::BadRange, "soft-min needs a positive D_hat");
    tau_r = std::log(static_cast<double>(cfg.M)) / oracle.upper_bound();
  }

  DriverResult result;
  auto& trace = result.trace;
  ModelPtr current = base;
  for (std::int64_t r = 1; r <= cfg.Q; ++r) {
    Rng rng = make_stream(cfg.seed, {kRoundStream, static_cast<std::uint64_t>(r)});
    Rng keep_rng = make_stream(cfg.seed, {kKeepStream, static_cast<std::uint64_t>(r)});
    std::vector<Solution> batch;
    std::vector<double> costs;
    std::vector<Solution> elite;
    std::vector<double> elite_costs;
    for (int attempt = 0;; ++attempt) {
      batch.clear();
      costs.clear();
      for (std::int64_t i = 0; i < batch_size; ++i) {
        batch.push_back(current->sample(rng));
        costs.push_back(oracle(batch.back()));
        ++trace.oracle_calls;
        if (trace.oracle_calls == 1 || costs.back() < trace.best_cost) {
          trace.best_cost = costs.back();
          trace.best_state = batch.back();
        }
      }
      elite.clear();
      elite_costs.clear();
      if (!cfg.softmin) {
        for (std::size_t i : elite_indices(costs, static_cast<std::size_t>(cfg.m))) {
          elite.push_back(batch[i]);
          elite_costs.push_back(costs[i]);
        }
        break;
      }
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (std::log(uniform_open(keep_rng)) <= -tau_r * costs[i]) {
          elite.push_back(batch[i]);
          elite_costs.push_back(costs[i]);
        }
      }
      if (!elite.empty()) break;
      if (attempt == kSoftMinRetries) {
        throw Error(ErrorCode::EmptyKeepSet, "soft-min kept nothing in round " + std::to_string(r) + " after " +
                                                 std::to_string(kSoftMinRetries) + " retries");
      }
    }
    current = refit_from(cfg.learner, elite, space, current);

    TraceRecord rec;
    rec.phase = "round";
    rec.index = r;
    rec.tau_or_round = static_cast<double>(r);
    rec.batch_costs = costs;
    rec.elite_costs = elite_costs;
    fill_stats(rec);
    rec.accept_rate = static_cast<double>(elite.size()) / static_cast<double>(batch.size());
    rec.best_cost = trace.best_cost;
    rec.oracle_calls = trace.oracle_calls;
    rec.wall_ms = cfg.timing ? elapsed_ms(start) : 0.0;
    trace.records.push_back(std::move(rec));
    result.samples = std::move(elite);
    if (cfg.stop_at_zero && trace.best_cost == 0.0) break;
  }
  result.model = current;
  return result;
}

// ---------------------------------------------------------------- baselines

std::pair<Solution, double> best_of_model(const GenerativeModel& model, const CostOracle& oracle, std::int64_t N,
                                          Rng& rng) {
  if (N < 1) throw Error(ErrorCode::BadRange, "N must be >= 1");
  Solution best = model.sample(rng);
  double best_cost = oracle(best);
  for (std::int64_t i = 1; i < N; ++i) {
    Solution s = model.sample(rng);
    const double c = oracle(s);
    if (c < best_cost) {
      best_cost = c;
      best = std::move(s);
    }
  }
  return {std::move(best), best_cost};
}

std::pair<Solution, double> best_of_alg(const FeasibleSampler& sampler, const CostOracle& oracle,
                                        const GenerativeModel& base, std::int64_t N, Rng& rng) {
  if (N < 1) throw Error(ErrorCode::BadRange, "N must be >= 1");
  Solution best;
  double best_lp = 0.0;
  for (std::int64_t i = 0; i < N; ++i) {
    Solution s = sampler(rng);
    const double c = oracle(s);
    if (c != 0.0) throw Error(ErrorCode::InfeasibleDraw, "feasible sampler produced cost " + std::to_string(c));
    const double lp = base.log_density(s);
    if (i == 0 || lp > best_lp) {
      best_lp = lp;
      best = std::move(s);
    }
  }
  return {std::move(best), best_lp};
}

Solution random_spanning_tree(const Graph& g, Rng& rng) {
  UnionFind all(g.num_vertices());
  for (const auto& [u, v] : g.edges()) all.unite(u, v);
  if (all.components() != 1) throw Error(ErrorCode::Disconnected, "graph has no spanning tree");

  std::vector<std::size_t> order(g.num_edges());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  UnionFind uf(g.num_vertices());
  std::vector<Token> tokens(g.num_edges(), 0);
  for (std::size_t e : order) {
    const auto [u, v] = g.edge(e);
    if (uf.unite(u, v)) tokens[e] = 1;
  }
  return Solution(std::move(tokens));
}

Solution random_linear_forest(const Graph& g, int target_edges, Rng& rng) {
  std::vector<std::size_t> order(g.num_edges());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  UnionFind uf(g.num_vertices());
  std::vector<int> degree(static_cast<std::size_t>(g.num_vertices()), 0);
  std::vector<Token> tokens(g.num_edges(), 0);
  int added = 0;
  for (std::size_t e : order) {
    if (added >= target_edges) break;
    const auto [u, v] = g.edge(e);
    if (degree[static_cast<std::size_t>(u)] >= 2 || degree[static_cast<std::size_t>(v)] >= 2) continue;
    if (!uf.unite(u, v)) continue;
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
    tokens[e] = 1;
    ++added;
  }
  return Solution(std::move(tokens));
}

ModelPtr forest_base_model(const Graph& g, int count, const LearnerSettings& settings, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::BadRange, "need at least one forest");
  const int n = g.num_vertices();
  Rng rng = make_stream(seed, {0xF0E5});
  std::uniform_int_distribution<int> size(n / 2, std::max(n / 2, n - 2));
  std::vector<Solution> forests;
  for (int i = 0; i < count; ++i) forests.push_back(random_linear_forest(g, size(rng), rng));
  return refit(settings, forests, g.subset_space(), nullptr);
}

}  // namespace gpo
