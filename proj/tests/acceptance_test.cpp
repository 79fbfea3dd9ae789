#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gpo/drivers.hpp"
#include "gpo/experiment.hpp"
#include "gpo/expfam.hpp"
#include "gpo/gaussian.hpp"
#include "gpo/problems.hpp"
#include "gpo/sampler.hpp"
#include "gpo/verification.hpp"
#include "oracles.hpp"
#include "test_models.hpp"

using namespace gpo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome stationarity() {
  auto inst = make_scheduling_instance({1, 1}, {1, 1, 1}, {2, 2, 2});
  auto space = duration_space(3, 1, 4);
  auto oracle = scheduling_oracle(inst, 1, 2.0);
  auto base = testing::uniform(space);
  double worst = 0.0;
  for (const auto& s : enumerate(space)) worst = std::max(worst, oracle(s));

  AnnealConfig cfg;
  cfg.m = 20000;
  cfg.M = 64;
  cfg.T = 2.0;
  cfg.d_hat = 2.0;
  cfg.learner.kind = LearnerKind::categorical;
  cfg.learner.fit.alpha = 1.0;
  cfg.learner.fit.lambda = 0.0;
  cfg.seed = 2024;
  auto run = aldrift(cfg, base, oracle);
  const double tv = tv_distance(empirical_dist(run.samples, space), exact_target(space, *base, oracle, cfg.T));
  return {tv <= 0.05 && worst <= cfg.d_hat,
          fmt("|S|=%zu max cost %.0f, TV(S_T, p_T)=%.4f (limit 0.05)", model_table(*base).size(), worst, tv)};
}

Outcome mixing_bound() {
  SolutionSpace two({2});
  auto target = testing::categorical(two, {{2.0 / 3.0, 1.0 / 3.0}});
  auto proposal = testing::uniform(two);
  CostOracle zero("zero", [](const Solution&) { return 0.0; }, 1.0);
  auto run = [&](std::int64_t M, std::uint64_t seed) {
    MixingSetup s;
    s.M = M;
    s.n_chains = 100000;
    s.seed = seed;
    return check_mixing(two, target, zero, *proposal, s);
  };
  auto main = run(20, 1);
  const double limit = 2.0 * std::pow(1.0 - 3.0 / 4.0, 20) + 3.0 * std::sqrt(2.0 / 1e5);
  double tv5 = 0.0, tv40 = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    tv5 += run(5, seed).measured / 10.0;
    tv40 += run(40, seed).measured / 10.0;
  }
  return {main.measured <= limit && tv40 <= tv5,
          fmt("TV at M=20 %.5f (limit %.5f, R=%.4f); mean TV M=40 %.5f vs M=5 %.5f", main.measured, limit,
              main.details["R"].get<double>(), tv40, tv5)};
}

Outcome normalizer_cancellation() {
  std::mt19937_64 gen(77);
  int identical = 0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<std::size_t> sizes;
    std::size_t card = 1;
    const int positions = 1 + static_cast<int>(gen() % 3);
    for (int i = 0; i < positions; ++i) {
      const std::size_t a = 2 + gen() % 3;
      if (card * a > 64) break;
      sizes.push_back(a);
      card *= a;
    }
    SolutionSpace space(sizes);
    Rng rng(gen());
    auto base = testing::random_categorical(space, rng);
    auto q = testing::random_categorical(space, rng);
    std::vector<double> d(card);
    for (double& x : d) x = static_cast<double>(gen() % 5);
    const std::uint64_t stream = gen();
    std::vector<std::vector<bool>> runs;
    for (double c : {-30.0, 0.0, 30.0}) {
      ModelPtr scaled = std::make_shared<testing::ScaledModel>(base, c * std::log(10.0));
      TargetSpec t{scaled, testing::ranked_oracle(space, d, 4), 0.9, 1.0, 4};
      Rng r(stream);
      runs.push_back(run_chain(*q, t, 200, r, ChainOptions{std::nullopt, true}).decisions);
    }
    identical += runs[0] == runs[1] && runs[1] == runs[2];
  }
  return {identical == 100, fmt("%d/100 pairs bit-identical across c in {1e-30, 1, 1e30}", identical)};
}

ExperimentConfig scheduling_config(MethodKind method) {
  ExperimentConfig c;
  c.problem = ProblemKind::scheduling_fixed;
  c.method = method;
  c.N = 400;
  c.m = 4;
  c.M = 12;
  c.Q = 8;
  c.learner.kind = LearnerKind::categorical;
  c.learner.fit.alpha = 0.01;
  c.learner.fit.lambda = 0.2;
  c.learner.fit.share_positions = true;
  return c;
}

Outcome scheduling_experiment() {
  auto baseline = scheduling_config(MethodKind::best_of_model);
  auto topift = scheduling_config(MethodKind::topift);
  std::vector<double> base_best;
  int zero = 0, below = 0;
  std::vector<double> final_medians;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) base_best.push_back(run_seed(baseline, seed).best_cost);
  const double base_median = median(base_best);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto o = run_seed(topift, seed);
    zero += o.best_cost == 0.0;
    const double final_median = o.trace.records.back().batch_med;
    final_medians.push_back(final_median);
    below += final_median < base_median;
  }
  const bool pass = base_median >= 80.0 && zero >= 14 && below == 20;
  return {pass, fmt("baseline median best %.1f (need >= 80); TopIFT reaches 0 in %d/20 (need 14); "
                    "final-round median below baseline median in %d/20 (max final-round median %.1f)",
                    base_median, zero, below, *std::max_element(final_medians.begin(), final_medians.end()))};
}

Outcome spanning_tree_experiment() {
  ExperimentConfig c;
  c.problem = ProblemKind::spanning_tree;
  c.method = MethodKind::topift;
  c.n = 16;
  c.p = 0.4;
  c.forests = 200;
  c.base_order = 2;
  c.base_alpha = 1.0;
  c.m = 4;
  c.M = 50;
  c.Q = 3;
  c.learner.kind = LearnerKind::ngram;
  c.learner.fit.order = 2;
  c.learner.fit.alpha = 1.0;
  c.learner.fit.lambda = 0.5;
  int connected = 0, low_degree = 0;
  std::string degrees;
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto o = run_seed(c, seed);
    connected += o.extra["tree_cost"].get<int>() == 0;
    const int dv = o.extra["degree_violation"].get<int>();
    low_degree += dv <= 2;
    degrees += (degrees.empty() ? "" : ",") + std::to_string(dv);
  }
  return {connected == 15 && low_degree >= 10,
          fmt("tree_cost=0 in %d/15 (need 15); degree_violation<=2 in %d/15 (need 10); violations [%s]", connected,
              low_degree, degrees.c_str())};
}

Outcome gmm_coverage() {
  GaussianMixture mix({-3.0, 3.0});
  int within = 0, dominated = 0;
  double worst = 0.0, bound = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    GmmSetup s;
    s.seed = seed;
    s.m = 10000;
    s.C = 2.0;
    auto r = gmm_coverage_check(mix, s);
    within += r.pass;
    dominated += r.details["envelope_dominates"].get<bool>();
    worst = std::max(worst, r.measured);
    bound = r.bound;
  }
  return {within >= 48 && dominated == 50,
          fmt("sup <= 2*Delta*e^k in %d/50 (need 48); envelope dominates in %d/50; worst sup %.3f vs %.3f", within,
              dominated, worst, bound)};
}

Outcome expfam_learnability() {
  struct Case {
    ExpFamilySpec spec;
    double mean;
  };
  std::vector<Case> cases{{ExpFamilySpec::bernoulli(), 0.5},
                          {ExpFamilySpec::poisson(), 5.0},
                          {ExpFamilySpec::exponential(), 1.0},
                          {ExpFamilySpec::gaussian(1.0), 0.0}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    ExpfamSetup s;
    s.eta0 = c.spec.eta_from_mean(c.mean);
    s.m = 10000;
    s.gamma = 0.1;
    s.trials = 200;
    s.seed = 7;
    auto r = expfam_tail_check(c.spec, s);
    pass = pass && r.pass;
    detail += fmt("%s freq %.3f moment err %.1e; ", std::string(to_string(c.spec.family())).c_str(), r.measured,
                  r.details["max_moment_error"].get<double>());
  }
  return {pass, detail + "(need freq >= 0.9, err <= 1e-10)"};
}

Outcome oracle_equivalence() {
  int wait_mismatch = 0;
  std::int64_t wait_cases = 0;
  std::mt19937_64 gen(5);
  for (int K = 1; K <= 4; ++K) {
    std::vector<SchedulingInstance> instances{fixed_scheduling_instance(K)};
    for (int i = 0; i < 40; ++i) instances.push_back(gen_scheduling_instance(gen(), K, 1, i % 2 ? 5 : 20));
    for (const auto& inst : instances) {
      std::vector<int> v(K, 0);
      while (true) {
        wait_mismatch += wait_time(inst, v) != oracle::minute_wait(inst, v);
        ++wait_cases;
        int i = 0;
        while (i < K && ++v[i] > 5) v[i++] = 0;
        if (i == K) break;
      }
    }
  }

  int tree_mismatch = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 15);
    Graph g = gen_planted_graph(gen(), n, 0.4);
    std::vector<Token> t(g.num_edges());
    const auto keep = gen() % 4;
    for (auto& x : t) x = static_cast<Token>(gen() % 4 <= keep ? 1 : 0);
    Solution s(t);
    tree_mismatch += tree_cost(g, s) != oracle::bfs_components(n, decode_edge_subset(s, g)) - 1;
  }

  int ham_mismatch = 0, cycle_mismatch = 0;
  std::int64_t subsets = 0;
  for (int n = 2; n <= 7; ++n) {
    Graph g = gen_planted_graph(1, n, 1.0);
    std::set<std::uint32_t> paths;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::uint32_t mask = 0;
      for (int i = 0; i + 1 < n; ++i) {
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
          auto [a, b] = g.edge(e);
          if ((a == perm[i] && b == perm[i + 1]) || (b == perm[i] && a == perm[i + 1])) mask |= 1u << e;
        }
      }
      paths.insert(mask);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const std::uint32_t total = 1u << g.num_edges();
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      std::vector<Token> t(g.num_edges());
      for (std::size_t e = 0; e < t.size(); ++e) t[e] = static_cast<Token>((mask >> e) & 1u);
      Solution s(t);
      const bool both = tree_cost(g, s) == 0 && degree_violation(g, s) == 0;
      if (both != paths.contains(mask)) {
        ++ham_mismatch;
        cycle_mismatch += oracle::is_hamiltonian_cycle(n, decode_edge_subset(s, g));
      }
      ++subsets;
    }
  }
  return {wait_mismatch == 0 && tree_mismatch == 0 && ham_mismatch == 0,
          fmt("wait %d/%lld mismatches; tree_cost %d/1000; Hamiltonian-path characterization %d/%lld "
              "(%d of them Hamiltonian cycles)",
              wait_mismatch, static_cast<long long>(wait_cases), tree_mismatch, ham_mismatch,
              static_cast<long long>(subsets), cycle_mismatch)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double limit_s;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "end-to-end stationarity", 60, stationarity},
      {"AC2", "mixing bound", 10, mixing_bound},
      {"AC3", "normalizer cancellation", 60, normalizer_cancellation},
      {"AC4", "scheduling experiment", 300, scheduling_experiment},
      {"AC5", "spanning-tree experiment", 600, spanning_tree_experiment},
      {"AC6", "gaussian-mixture coverage", 60, gmm_coverage},
      {"AC7", "exponential-family learnability", 120, expfam_learnability},
      {"AC8", "oracle equivalence", 30, oracle_equivalence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %s %s: %s [%.1fs, limit %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
