#include <catch2/catch_amalgamated.hpp>

#include "fairrank/domain.hpp"
#include "fairrank/rng.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fairrank;

TEST_CASE("rank_by_score sorts descending") {
  const Ranking r = rank_by_score({{1, 0.5}, {2, 0.9}});
  REQUIRE(r.order() == std::vector<std::int64_t>{2, 1});
  REQUIRE(r.position_of(2) == 1);
  REQUIRE(r.position_of(1) == 2);
}

TEST_CASE("rank_by_score breaks ties by ascending id") {
  const Ranking r = rank_by_score({{2, 0.5}, {1, 0.5}});
  REQUIRE(r.order() == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("rank_by_score matches a selection-sort oracle on random input") {
  SplitMix64 rng(99);
  std::vector<RankedItem> items;
  for (std::int64_t i = 0; i < 100; ++i) {
    // coarse scores so ties actually occur
    items.push_back({i, std::floor(rng.uniform01() * 25.0)});
  }
  const auto expected = oracle::selection_sort_ranking(items);
  REQUIRE(rank_by_score(items).order() == expected);
}

TEST_CASE("rank_by_score is pure and a fixed point on its own output") {
  SplitMix64 rng(7);
  std::vector<RankedItem> items;
  for (std::int64_t i = 0; i < 40; ++i) items.push_back({i, rng.normal()});
  const Ranking once = rank_by_score(items);
  const Ranking again = rank_by_score(items);
  REQUIRE(once.order() == again.order());
  const Ranking rerank = rank_by_score(once.items);
  REQUIRE(rerank.order() == once.order());
}

TEST_CASE("rank_by_score rejects non-finite scores naming the candidate") {
  REQUIRE_THROWS_WITH(rank_by_score({{5, 1.0}, {77, std::nan("")}}),
                      Catch::Matchers::ContainsSubstring("77"));
}

TEST_CASE("group_proportions on a (W)NBA-sized test split") {
  std::vector<Candidate> cands;
  for (std::int64_t i = 0; i < 992; ++i) {
    const GroupLabel g = i < 774 ? GroupLabel::Advantaged : GroupLabel::Disadvantaged;
    cands.push_back(testutil::candidate(i, {0.0}, 0.0, g));
  }
  const auto p = group_proportions(cands, false);
  REQUIRE(p.at(GroupLabel::Advantaged) == Catch::Approx(0.78).margin(0.0025));
  REQUIRE(p.at(GroupLabel::Advantaged) + p.at(GroupLabel::Disadvantaged) ==
          Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("group_proportions splits evenly for one candidate per group") {
  std::vector<Candidate> cands = {
      testutil::candidate(1, {0.0}, 0.0, GroupLabel::Advantaged),
      testutil::candidate(2, {0.0}, 0.0, GroupLabel::Disadvantaged)};
  const auto p = group_proportions(cands, false);
  REQUIRE(p.at(GroupLabel::Advantaged) == 0.5);
  REQUIRE(p.at(GroupLabel::Disadvantaged) == 0.5);
}

TEST_CASE("group_proportions matches the counting oracle on random candidates") {
  SplitMix64 rng(3);
  std::vector<Candidate> cands;
  for (std::int64_t i = 0; i < 50; ++i) {
    const GroupLabel g = rng.uniform01() < 0.3 ? GroupLabel::Disadvantaged
                                               : GroupLabel::Advantaged;
    cands.push_back(testutil::candidate(i, {0.0}, 0.0, g));
  }
  const auto expected = oracle::proportions_naive(cands, false);
  const auto got = group_proportions(cands, false);
  REQUIRE(got.at(GroupLabel::Disadvantaged) == expected.at(GroupLabel::Disadvantaged));
  REQUIRE(got.at(GroupLabel::Advantaged) == expected.at(GroupLabel::Advantaged));
}

TEST_CASE("group_proportions rejects empty input and unresolved unknowns") {
  REQUIRE_THROWS(group_proportions({}, false));
  auto c = testutil::candidate(1, {0.0}, 0.0, GroupLabel::Advantaged);
  c.observed_group.reset();
  auto d = testutil::candidate(2, {0.0}, 0.0, GroupLabel::Disadvantaged);
  REQUIRE_THROWS_WITH(group_proportions({c, d}, true),
                      Catch::Matchers::ContainsSubstring("resolve unknowns"));
  REQUIRE_NOTHROW(group_proportions({c, d}, false));
}

TEST_CASE("observed and true proportions agree when labels agree") {
  auto data = testutil::random_dataset(60, 2, 0.25, 0.0, 5);
  const auto t = group_proportions(data.candidates, false);
  const auto o = group_proportions(data.candidates, true);
  REQUIRE(t.at(GroupLabel::Disadvantaged) == o.at(GroupLabel::Disadvantaged));
}

TEST_CASE("Dataset::make validates ids, dimensions and groups") {
  using testutil::candidate;
  REQUIRE_THROWS_WITH(
      Dataset::make({candidate(1, {0.0}, 0.0, GroupLabel::Advantaged),
                     candidate(1, {0.0}, 0.0, GroupLabel::Disadvantaged)},
                    {"f0"}),
      Catch::Matchers::ContainsSubstring("duplicate"));
  REQUIRE_THROWS(Dataset::make({candidate(1, {0.0, 1.0}, 0.0, GroupLabel::Advantaged),
                                candidate(2, {0.0}, 0.0, GroupLabel::Disadvantaged)},
                               {"f0"}));
  REQUIRE_THROWS_WITH(
      Dataset::make({candidate(1, {0.0}, 0.0, GroupLabel::Advantaged),
                     candidate(2, {0.0}, 0.0, GroupLabel::Advantaged)},
                    {"f0"}),
      Catch::Matchers::ContainsSubstring("both groups"));
}
