#include <doctest.h>

#include <random>
#include <unordered_set>

#include "gpo/errors.hpp"
#include "gpo/graph.hpp"
#include "gpo/solution_space.hpp"

using namespace gpo;

TEST_CASE("enumerate small spaces in lexicographic order") {
  auto one = enumerate(SolutionSpace({2}));
  REQUIRE(one.size() == 2);
  CHECK(one[0] == Solution({0}));
  CHECK(one[1] == Solution({1}));

  auto two = enumerate(SolutionSpace({2, 2}));
  std::vector<Solution> want{Solution({0, 0}), Solution({0, 1}), Solution({1, 0}), Solution({1, 1})};
  CHECK(two == want);
}

TEST_CASE("enumerate refuses spaces beyond the budget") {
  auto big = SolutionSpace::uniform(10, 20);
  CHECK_THROWS_AS(enumerate(big, 1'000'000), Error);
  try {
    enumerate(big, 1'000'000);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CardinalityExceeded);
  }
  auto huge = SolutionSpace::uniform(40, 1000);
  CHECK_FALSE(huge.cardinality().has_value());
  CHECK_THROWS_AS(enumerate(huge), Error);
}

TEST_CASE("enumeration emits cardinality distinct solutions") {
  for (auto alphabet : {std::vector<std::size_t>{3, 4, 5}, {2, 2, 2, 2, 2, 2}, {7}, {10, 10, 10, 10, 10}}) {
    SolutionSpace space(alphabet);
    auto all = enumerate(space);
    std::unordered_set<Solution, SolutionHash> seen(all.begin(), all.end());
    CHECK(seen.size() == *space.cardinality());
    CHECK(all.size() == *space.cardinality());
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(space.index_of(all[i]) == i);
      CHECK(space.solution_at(i) == all[i]);
      if (i) CHECK(all[i - 1] < all[i]);
    }
  }
}

TEST_CASE("validation") {
  SolutionSpace space({3, 3});
  CHECK(space.contains(Solution({2, 0})));
  CHECK_FALSE(space.contains(Solution({3, 0})));
  CHECK_FALSE(space.contains(Solution({0})));
  CHECK_THROWS_AS(space.validate(Solution({0, -1})), Error);
  CHECK_THROWS_AS(SolutionSpace({}), Error);
  CHECK_THROWS_AS(SolutionSpace({2, 0}), Error);
}

TEST_CASE("duration encoding") {
  auto space = SolutionSpace::uniform(10, 20, EncodingKind::duration_vector);
  std::vector<int> top(10, 20);
  auto s = encode_durations(top, 1, space);
  for (Token t : s.tokens) CHECK(t == 19);

  auto small = SolutionSpace::uniform(3, 20);
  std::vector<int> low{1, 1, 1};
  CHECK(encode_durations(low, 1, small) == Solution({0, 0, 0}));

  std::vector<int> below{0, 1, 1};
  CHECK_THROWS_AS(encode_durations(below, 1, small), Error);
  std::vector<int> above{21, 1, 1};
  CHECK_THROWS_AS(encode_durations(above, 1, small), Error);
  std::vector<int> shorter{1, 1};
  CHECK_THROWS_AS(encode_durations(shorter, 1, small), Error);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dist(1, 20);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<int> v(10);
    for (int& x : v) x = dist(rng);
    CHECK(decode_durations(encode_durations(v, 1, space), 1) == v);
  }
}

TEST_CASE("edge subset encoding") {
  Graph tri(3, {{1, 2}, {0, 2}, {1, 0}});
  CHECK(tri.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(encode_edge_subset({}, tri) == Solution({0, 0, 0}));
  CHECK(encode_edge_subset({{0, 1}, {0, 2}, {1, 2}}, tri) == Solution({1, 1, 1}));
  CHECK(encode_edge_subset({{0, 1}, {2, 1}}, tri) == Solution({1, 0, 1}));
  CHECK_THROWS_AS(encode_edge_subset({{0, 3}}, tri), Error);

  std::mt19937_64 rng(3);
  Graph k5(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<Token> t(k5.num_edges());
    for (auto& x : t) x = static_cast<Token>(rng() & 1);
    Solution s(t);
    CHECK(encode_edge_subset(decode_edge_subset(s, k5), k5) == s);
  }
  CHECK_THROWS_AS(decode_edge_subset(Solution({1, 0}), tri), Error);
}

TEST_CASE("graph construction rejects bad edges") {
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), Error);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), Error);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), Error);
}
