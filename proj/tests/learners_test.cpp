#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gpo/errors.hpp"
#include "gpo/learners.hpp"
#include "gpo/verification.hpp"

using namespace gpo;

namespace {

std::vector<Solution> random_samples(const SolutionSpace& space, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Solution> out;
  for (int i = 0; i < n; ++i) {
    std::vector<Token> t(space.num_positions());
    for (std::size_t p = 0; p < t.size(); ++p) {
      // skewed toward small tokens so fits are not uniform
      std::uniform_int_distribution<int> d(0, static_cast<int>(space.alphabet_size(p)) - 1);
      t[p] = static_cast<Token>(std::min(d(rng), d(rng)));
    }
    out.emplace_back(std::move(t));
  }
  return out;
}

double total_mass(const GenerativeModel& m) {
  double s = 0;
  for (const auto& x : enumerate(m.space())) s += std::exp(m.log_density(x));
  return s;
}

}  // namespace

TEST_CASE("categorical fit by counting") {
  SolutionSpace space({3, 3});
  std::vector<Solution> xs{Solution({0, 1}), Solution({0, 2})};
  auto m = fit_categorical(xs, space, FitOptions{0.0, 0.0});
  CHECK(m.probabilities(0) == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(m.probabilities(1) == std::vector<double>{0.0, 0.5, 0.5});

  auto s = fit_categorical(xs, space, FitOptions{1.0, 0.0});
  CHECK(s.probabilities(0)[0] == doctest::Approx(3.0 / 5.0));
  CHECK(s.probabilities(0)[1] == doctest::Approx(1.0 / 5.0));
  CHECK(s.probabilities(0)[2] == doctest::Approx(1.0 / 5.0));

  auto warm = CategoricalModel::uniform(space);
  auto same = fit_categorical(xs, space, FitOptions{1.0, 1.0}, &warm);
  for (std::size_t i = 0; i < 2; ++i) CHECK(same.probabilities(i) == warm.probabilities(i));

  CHECK_THROWS_AS(fit_categorical({}, space, FitOptions{}), Error);
  std::vector<Solution> bad{Solution({0, 3})};
  CHECK_THROWS_AS(fit_categorical(bad, space, FitOptions{}), Error);
}

TEST_CASE("warm start mixing is an exact contraction") {
  SolutionSpace space({4, 3, 5});
  auto xs = random_samples(space, 50, 1);
  auto warm = fit_categorical(random_samples(space, 30, 2), space, FitOptions{1.0, 0.0});
  auto fresh = fit_categorical(xs, space, FitOptions{1.0, 0.0});
  for (double lambda : {0.1, 0.5, 0.9}) {
    auto mixed = fit_categorical(xs, space, FitOptions{1.0, lambda}, &warm);
    for (std::size_t p = 0; p < 3; ++p) {
      for (std::size_t k = 0; k < space.alphabet_size(p); ++k) {
        const double lhs = mixed.probabilities(p)[k] - fresh.probabilities(p)[k];
        const double rhs = lambda * (warm.probabilities(p)[k] - fresh.probabilities(p)[k]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("tied positions pool counts") {
  SolutionSpace space({3, 3});
  std::vector<Solution> xs{Solution({0, 1}), Solution({0, 2})};
  FitOptions opts{0.0, 0.0, true};
  auto m = fit_categorical(xs, space, opts);
  CHECK(m.probabilities(0) == std::vector<double>{0.5, 0.25, 0.25});
  CHECK(m.probabilities(1) == m.probabilities(0));
  CHECK_THROWS_AS(fit_categorical(std::vector<Solution>{Solution({0, 0})}, SolutionSpace({2, 3}), opts), Error);
}

TEST_CASE("models are normalized") {
  SolutionSpace space({3, 2, 4, 2});
  auto xs = random_samples(space, 40, 4);
  CHECK(total_mass(CategoricalModel::uniform(space)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(total_mass(fit_categorical(xs, space, FitOptions{0.5, 0.0})) == doctest::Approx(1.0).epsilon(1e-9));
  for (int order : {1, 2, 3, 4}) {
    auto ng = fit_ngram(xs, space, FitOptions{0.5, 0.0, false, order});
    CHECK(std::abs(total_mass(ng) - 1.0) <= 1e-9);
    auto warm = ng;
    auto again = fit_ngram(random_samples(space, 10, 9), space, FitOptions{1.0, 0.3, false, order}, &warm);
    CHECK(std::abs(total_mass(again) - 1.0) <= 1e-9);
    for (const auto& s : enumerate(space)) CHECK(std::isfinite(again.log_density(s)));
  }
}

TEST_CASE("n-gram fits") {
  SolutionSpace space({3, 4, 2});
  auto xs = random_samples(space, 25, 5);
  auto cat = fit_categorical(xs, space, FitOptions{0.7, 0.0});
  auto ng = fit_ngram(xs, space, FitOptions{0.7, 0.0, false, 1});
  for (const auto& s : enumerate(space)) CHECK(ng.log_density(s) == doctest::Approx(cat.log_density(s)).epsilon(1e-12));

  Solution star({2, 1, 0});
  std::vector<Solution> same(5, star);
  auto point = fit_ngram(same, space, FitOptions{0.0, 0.0, false, 2});
  Rng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(point.sample(rng) == star);

  SolutionSpace two({2, 2});
  std::vector<Solution> diag{Solution({0, 0}), Solution({1, 1})};
  auto bigram = fit_ngram(diag, two, FitOptions{0.0, 0.0, false, 2});
  CHECK(bigram.conditional(1, {0}).prob(0) == 1.0);
  CHECK(bigram.conditional(1, {1}).prob(1) == 1.0);

  std::vector<Solution> only_zero{Solution({0, 0})};
  auto partial = fit_ngram(only_zero, two, FitOptions{0.0, 0.0, false, 2});
  CHECK(partial.conditional(1, {1}).prob(0) == 0.5);
}

TEST_CASE("sampling matches density") {
  SolutionSpace four({2, 2});
  auto uni = CategoricalModel::uniform(four);
  Rng rng(2024);
  std::vector<Solution> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(uni.sample(rng));
  auto emp = empirical_dist(xs, four);
  for (double p : emp.p) CHECK(std::abs(p - 0.25) <= 0.01);

  SolutionSpace space({4, 4, 4});
  auto train = random_samples(space, 60, 6);
  std::vector<ModelPtr> models{std::make_shared<CategoricalModel>(fit_categorical(train, space, FitOptions{1.0, 0.0})),
                               std::make_shared<NGramModel>(fit_ngram(train, space, FitOptions{1.0, 0.0, false, 2}))};
  for (const auto& m : models) {
    const int N = 100000;
    std::vector<Solution> draws;
    for (int i = 0; i < N; ++i) draws.push_back(m->sample(rng));
    auto e = empirical_dist(draws, space);
    auto exact = model_table(*m);
    int bad = 0;
    for (std::size_t i = 0; i < e.size(); ++i) bad += std::abs(e[i] - exact[i]) > 4.0 / std::sqrt(N);
    CHECK(bad == 0);
  }
}

TEST_CASE("point mass and determinism") {
  SolutionSpace space({5, 5, 5});
  Solution s({4, 0, 2});
  auto pm = CategoricalModel::point_mass(space, s);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) CHECK(pm.sample(rng) == s);
  CHECK(pm.log_density(s) == 0.0);

  auto m = fit_categorical(random_samples(space, 20, 3), space, FitOptions{});
  Rng a(77), b(77);
  for (int i = 0; i < 100; ++i) CHECK(m.sample(a) == m.sample(b));
}

TEST_CASE("categorical rejects unnormalized vectors") {
  CHECK_THROWS_AS(Categorical({0.5, 0.4}), Error);
  CHECK_THROWS_AS(Categorical({1.5, -0.5}), Error);
  CHECK_THROWS_AS(CategoricalModel(SolutionSpace({2}), {{0.5, 0.25, 0.25}}), Error);
}

TEST_CASE("refit dispatch") {
  SolutionSpace space({3, 3, 3});
  auto xs = random_samples(space, 20, 8);
  ModelPtr base = std::make_shared<CategoricalModel>(CategoricalModel::uniform(space));
  auto cat = refit({LearnerKind::categorical, FitOptions{1.0, 0.5}}, xs, space, base);
  CHECK(dynamic_cast<const CategoricalModel*>(cat.get()) != nullptr);
  auto ng = refit({LearnerKind::ngram, FitOptions{1.0, 0.5, false, 2}}, xs, space, base);
  CHECK(dynamic_cast<const NGramModel*>(ng.get()) != nullptr);
  CHECK_THROWS_AS(refit({LearnerKind::categorical, FitOptions{1.0, 0.5}}, xs, space, ng), Error);
}

TEST_CASE("model serialization round trips bit-exactly") {
  SolutionSpace space({3, 4, 2, 3}, EncodingKind::duration_vector);
  auto xs = random_samples(space, 30, 10);
  auto cat = fit_categorical(xs, space, FitOptions{0.3, 0.0});
  auto warm = fit_ngram(xs, space, FitOptions{0.3, 0.0, false, 3});
  auto ng = fit_ngram(random_samples(space, 12, 11), space, FitOptions{0.3, 0.4, false, 3}, &warm);
  for (const GenerativeModel* m : {static_cast<const GenerativeModel*>(&cat), static_cast<const GenerativeModel*>(&ng)}) {
    std::stringstream io;
    write_model(io, *m);
    auto back = read_model(io);
    CHECK(back->space() == m->space());
    CHECK(back->space().encoding_kind() == EncodingKind::duration_vector);
    for (const auto& s : enumerate(space)) CHECK(back->log_density(s) == m->log_density(s));
    std::stringstream again;
    write_model(again, *back);
    std::stringstream first;
    write_model(first, *m);
    CHECK(again.str() == first.str());
  }
  std::istringstream junk("model categorical\nalphabet 2\nencoding generic\nalpha 1\np 0 0.5 x\n");
  CHECK_THROWS_AS(read_model(junk), Error);
}
