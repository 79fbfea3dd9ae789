#include "gpo/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "gpo/errors.hpp"

namespace gpo {

namespace {

std::string describe(const Solution& s) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s.tokens[i];
  out << ')';
  return out.str();
}

struct ChainState {
  Solution s;
  double lw;
  double lq;
  double cost;
};

class Chain {
 public:
  Chain(const GenerativeModel& q, const TargetSpec& target, ChainResult& out) : q_(q), target_(target), out_(out) {}

  ChainState point(Solution s) {
    const auto wp = evaluate(target_, s);
    ++out_.oracle_calls;
    if (out_.oracle_calls == 1 || wp.cost < out_.best_cost) {
      out_.best_cost = wp.cost;
      out_.best_state = s;
    }
    const double lq = q_.log_density(s);
    return {std::move(s), wp.log_weight, lq, wp.cost};
  }

  void visit(const ChainState& st) {
    out_.max_log_coverage_seen = std::max(out_.max_log_coverage_seen, st.lw - st.lq);
  }

  bool step(ChainState& cur, Rng& rng) {
    ChainState prop = point(q_.sample(rng));
    const double log_beta = std::min(0.0, (prop.lw - prop.lq) - (cur.lw - cur.lq));
    const bool accept = std::log(uniform_open(rng)) <= log_beta;
    if (accept) cur = std::move(prop);
    return accept;
  }

 private:
  const GenerativeModel& q_;
  const TargetSpec& target_;
  ChainResult& out_;
};

}  // namespace

void TargetSpec::validate() const {
  if (!base) throw Error(ErrorCode::BadModel, "target has no base model");
  if (!(d_hat > 0.0)) throw Error(ErrorCode::BadRange, "D_hat must be positive");
  if (!(tau >= 0.0 && tau <= T)) throw Error(ErrorCode::BadRange, "temperature outside [0, T]");
}

WeightedPoint evaluate(const TargetSpec& target, const Solution& s) {
  const double d = target.oracle(s);
  if (d > target.d_hat) {
    throw Error(ErrorCode::CostBoundExceeded, "cost " + std::to_string(d) + " > D_hat " +
                                                  std::to_string(target.d_hat) + " at " + describe(s));
  }
  return {target.base->log_density(s) - target.tau * d, d};
}

double log_weight(const TargetSpec& target, const Solution& s) { return evaluate(target, s).log_weight; }

StepResult mh_step(const Solution& current, const GenerativeModel& proposal, const TargetSpec& target, Rng& rng) {
  ChainResult scratch;
  Chain chain(proposal, target, scratch);
  ChainState cur = chain.point(current);
  const bool accepted = chain.step(cur, rng);
  return {std::move(cur.s), accepted};
}

ChainResult run_chain(const GenerativeModel& proposal, const TargetSpec& target, std::int64_t M, Rng& rng,
                      const ChainOptions& opts) {
  if (M < 0) throw Error(ErrorCode::BadRange, "chain length must be non-negative");
  ChainResult out;
  Chain chain(proposal, target, out);
  ChainState cur = chain.point(opts.start ? *opts.start : proposal.sample(rng));
  out.start_cost = cur.cost;
  out.max_log_coverage_seen = cur.lw - cur.lq;
  if (opts.record_decisions) out.decisions.reserve(static_cast<std::size_t>(M));
  for (std::int64_t t = 0; t < M; ++t) {
    const bool accepted = chain.step(cur, rng);
    out.accept_count += accepted ? 1 : 0;
    if (opts.record_decisions) out.decisions.push_back(accepted);
    chain.visit(cur);
  }
  out.steps = M;
  out.final_state = std::move(cur.s);
  out.cost_of_final = cur.cost;
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

BatchResult draw_batch(const GenerativeModel& proposal, const TargetSpec& target, std::int64_t m, std::int64_t M,
                       std::uint64_t master_seed, std::uint64_t stream_index, unsigned threads) {
  if (m < 1) throw Error(ErrorCode::BadRange, "need at least one chain");
  target.validate();
  std::vector<ChainResult> chains(static_cast<std::size_t>(m));
  parallel_for(chains.size(), threads, [&](std::size_t k) {
    Rng rng = make_stream(master_seed, {stream_index, k});
    chains[k] = run_chain(proposal, target, M, rng);
  });

  BatchResult out;
  for (std::size_t k = 0; k < chains.size(); ++k) {
    auto& c = chains[k];
    out.accept_count += c.accept_count;
    out.steps += c.steps;
    out.oracle_calls += c.oracle_calls;
    out.max_log_coverage_seen = k == 0 ? c.max_log_coverage_seen
                                       : std::max(out.max_log_coverage_seen, c.max_log_coverage_seen);
    if (k == 0 || c.best_cost < out.best_cost) {
      out.best_cost = c.best_cost;
      out.best_state = c.best_state;
    }
    out.start_costs.push_back(c.start_cost);
    out.final_costs.push_back(c.cost_of_final);
    out.finals.push_back(std::move(c.final_state));
  }
  return out;
}

}  // namespace gpo
