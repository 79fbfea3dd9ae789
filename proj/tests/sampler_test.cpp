#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gpo/errors.hpp"
#include "gpo/sampler.hpp"
#include "gpo/verification.hpp"
#include "test_models.hpp"

using namespace gpo;
using testing::ranked_oracle;

namespace {

const SolutionSpace kTwo({2});

TargetSpec two_point_target(double tau) {
  return TargetSpec{testing::uniform(kTwo), ranked_oracle(kTwo, {0.0, 1.0}, 1.0), tau, tau, 1.0};
}

}  // namespace

TEST_CASE("log weights") {
  auto t0 = two_point_target(0.0);
  for (Token k : {0, 1}) CHECK(log_weight(t0, Solution({k})) == t0.base->log_density(Solution({k})));
  auto t = two_point_target(std::numbers::ln2);
  CHECK(log_weight(t, Solution({0})) - log_weight(t, Solution({1})) == doctest::Approx(std::numbers::ln2));

  SolutionSpace space({3, 3});
  Rng rng(1);
  auto base = testing::random_categorical(space, rng);
  std::vector<double> d{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> shifted;
  for (double x : d) shifted.push_back(x + 2.5);
  TargetSpec a{base, ranked_oracle(space, d, 20), 0.7, 1.0, 20};
  TargetSpec b{base, ranked_oracle(space, shifted, 20), 0.7, 1.0, 20};
  for (const auto& s : enumerate(space)) CHECK(log_weight(b, s) - log_weight(a, s) == doctest::Approx(-0.7 * 2.5));

  TargetSpec low{base, ranked_oracle(space, d, 4.0), 0.7, 1.0, 4.0};
  CHECK_THROWS_AS(log_weight(low, Solution({2, 2})), Error);
  CHECK_NOTHROW(log_weight(low, Solution({1, 1})));
}

TEST_CASE("acceptance probabilities") {
  // q uniform on {a, b}; w(a) = 1, w(b) = 3
  auto base = testing::categorical(kTwo, {{0.25, 0.75}});
  TargetSpec t{base, ranked_oracle(kTwo, {0.0, 0.0}, 1.0), 0.0, 0.0, 1.0};
  auto q = CategoricalModel::uniform(kTwo);
  Rng rng(4);
  const int N = 100000;
  int from_a_to_b = 0, moves_to_a = 0;
  for (int i = 0; i < N; ++i) {
    auto r = mh_step(Solution({0}), q, t, rng);
    if (r.next == Solution({1})) ++from_a_to_b;
    auto back = mh_step(Solution({1}), q, t, rng);
    if (back.next == Solution({0})) ++moves_to_a;
  }
  // a -> b accepted whenever b is proposed (probability 1/2); b -> a has probability (1/2)(1/3)
  CHECK(std::abs(from_a_to_b / double(N) - 0.5) <= 4 * std::sqrt(0.25 / N));
  CHECK(std::abs(moves_to_a / double(N) - 1.0 / 6.0) <= 4 * std::sqrt((1.0 / 6) * (5.0 / 6) / N));

  // proposal proportional to the target: every move accepted
  TargetSpec exact{base, ranked_oracle(kTwo, {0.0, 0.0}, 1.0), 0.0, 0.0, 1.0};
  Rng r2(5);
  auto chain = run_chain(*base, exact, 500, r2);
  CHECK(chain.accept_count == 500);
}

TEST_CASE("chains reach the target") {
  SUBCASE("already stationary on four points") {
    SolutionSpace four({4});
    auto q = testing::categorical(four, {{0.1, 0.2, 0.3, 0.4}});
    TargetSpec t{q, ranked_oracle(four, {0, 0, 0, 0}, 1.0), 0.0, 0.0, 1.0};
    auto batch = draw_batch(*q, t, 100000, 5, 17, 0);
    CHECK(tv_distance(empirical_dist(batch.finals, four), model_table(*q)) <= 0.02);
    CHECK(batch.accept_count == batch.steps);
  }
  SUBCASE("two-point target") {
    auto t = two_point_target(std::numbers::ln2);
    auto q = CategoricalModel::uniform(kTwo);
    auto batch = draw_batch(q, t, 100000, 30, 18, 0);
    const auto p = exact_target(kTwo, *t.base, t.oracle, t.tau);
    CHECK(p[0] == doctest::Approx(2.0 / 3.0));
    CHECK(tv_distance(empirical_dist(batch.finals, kTwo), p) <= 0.02);
  }
  SUBCASE("pooled small batches") {
    auto t = two_point_target(std::numbers::ln2);
    auto q = CategoricalModel::uniform(kTwo);
    std::vector<Solution> pooled;
    for (std::uint64_t rep = 0; rep < 2500; ++rep) {
      auto b = draw_batch(q, t, 4, 16, 1000 + rep, 0);
      pooled.insert(pooled.end(), b.finals.begin(), b.finals.end());
    }
    CHECK(tv_distance(empirical_dist(pooled, kTwo), exact_target(kTwo, *t.base, t.oracle, t.tau)) <= 0.05);
  }
}

TEST_CASE("stationarity on random enumerable targets") {
  Rng rng(404);
  for (auto alphabet : {std::vector<std::size_t>{4, 4, 4}, {2, 3, 5}}) {
    SolutionSpace space(alphabet);
    auto base = testing::random_categorical(space, rng, 0.3);
    auto q = testing::random_categorical(space, rng, 0.3);
    std::vector<double> d(*space.cardinality());
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (double& x : d) x = u(rng);
    TargetSpec t{base, ranked_oracle(space, d, 3.0), 1.0, 1.0, 3.0};
    const auto p = exact_target(space, *base, t.oracle, 1.0);
    double R = 0;
    for (const auto& s : enumerate(space)) R = std::max(R, p.at(s) / std::exp(q->log_density(s)));
    const auto M = static_cast<std::int64_t>(std::ceil(std::numbers::e * R * std::log(2000.0)));
    auto batch = draw_batch(*q, t, 100000, M, 5, 1);
    CHECK(tv_distance(empirical_dist(batch.finals, space), p) <= 0.03);
  }
}

TEST_CASE("chain diagnostics") {
  SolutionSpace space({3, 3});
  Rng rng(8);
  auto base = testing::random_categorical(space, rng);
  auto q = testing::random_categorical(space, rng);
  std::vector<double> d{0, 1, 2, 3, 4, 5, 6, 7, 8};
  TargetSpec t{base, ranked_oracle(space, d, 8), 0.5, 1.0, 8};
  double last = -1e300;
  for (std::int64_t M = 0; M <= 60; ++M) {
    Rng r(123);
    auto c = run_chain(*q, t, M, r);
    CHECK(c.accept_count <= c.steps);
    CHECK(c.steps == M);
    CHECK(c.oracle_calls == M + 1);
    CHECK(c.max_log_coverage_seen >= last);
    last = c.max_log_coverage_seen;
    CHECK(c.cost_of_final == t.oracle(c.final_state));
    CHECK(c.best_cost <= c.cost_of_final);
  }
  Rng r(9);
  auto fixed = run_chain(*q, t, 0, r, ChainOptions{Solution({2, 1}), false});
  CHECK(fixed.final_state == Solution({2, 1}));
}

TEST_CASE("batches are deterministic and order independent") {
  SolutionSpace space({4, 4});
  Rng rng(10);
  auto base = testing::random_categorical(space, rng);
  std::vector<double> d(16);
  for (std::size_t i = 0; i < 16; ++i) d[i] = static_cast<double>(i % 5);
  TargetSpec t{base, ranked_oracle(space, d, 4), 1.0, 1.0, 4};
  auto one = draw_batch(*base, t, 64, 20, 77, 3, 1);
  auto many = draw_batch(*base, t, 64, 20, 77, 3, 4);
  CHECK(one.finals == many.finals);
  CHECK(one.accept_count == many.accept_count);
  CHECK(one.oracle_calls == 64 * 21);

  auto single = draw_batch(*base, t, 1, 20, 77, 3);
  Rng stream = make_stream(77, {3, 0});
  auto chain = run_chain(*base, t, 20, stream);
  CHECK(single.finals.front() == chain.final_state);
  CHECK(single.finals.front() == one.finals.front());
}

TEST_CASE("scaling the weights leaves every decision unchanged") {
  Rng rng(55);
  int identical = 0;
  for (int pair = 0; pair < 30; ++pair) {
    SolutionSpace space({2 + rng() % 3, 2 + rng() % 3, 2 + rng() % 2});
    auto base = testing::random_categorical(space, rng);
    auto q = testing::random_categorical(space, rng);
    std::vector<double> d(*space.cardinality());
    for (double& x : d) x = static_cast<double>(rng() % 5);
    std::vector<std::vector<bool>> runs;
    for (double c : {-30.0, 0.0, 30.0}) {
      ModelPtr scaled = std::make_shared<testing::ScaledModel>(base, c * std::log(10.0));
      TargetSpec t{scaled, ranked_oracle(space, d, 4), 0.8, 1.0, 4};
      Rng stream(1000 + pair);
      runs.push_back(run_chain(*q, t, 200, stream, ChainOptions{std::nullopt, true}).decisions);
    }
    identical += runs[0] == runs[1] && runs[1] == runs[2];
  }
  CHECK(identical == 30);
}

TEST_CASE("rejection sampling needs about c/Z draws per acceptance") {
  SolutionSpace space({4, 4});
  Rng rng(66);
  auto base = testing::random_categorical(space, rng);
  auto q = testing::uniform(space);
  std::vector<double> d(16);
  for (std::size_t i = 0; i < 16; ++i) d[i] = static_cast<double>(i % 4);
  const double tau = 1.5;
  TargetSpec t{base, ranked_oracle(space, d, 3), tau, tau, 3};
  double Z = 0, c = 0;
  for (const auto& s : enumerate(space)) {
    const double w = std::exp(log_weight(t, s));
    Z += w;
    c = std::max(c, w / std::exp(q->log_density(s)));
  }
  std::int64_t draws = 0, accepted = 0;
  while (accepted < 20000) {
    Solution s = q->sample(rng);
    ++draws;
    const double w = std::exp(log_weight(t, s));
    if (uniform_open(rng) <= w / (c * std::exp(q->log_density(s)))) ++accepted;
  }
  CHECK(static_cast<double>(draws) / accepted == doctest::Approx(c / Z).epsilon(0.03));
}
