#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "fairrank/noise.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fairrank;
namespace fs = std::filesystem;

namespace {

std::set<std::int64_t> flipped_ids(const Dataset& before, const Dataset& after) {
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < before.size(); ++i)
    if (*before.candidates[i].observed_group != *after.candidates[i].observed_group)
      ids.insert(before.candidates[i].id);
  return ids;
}

}  // namespace

TEST_CASE("epsilon 0 is the identity") {
  auto data = testutil::random_dataset(50, 1, 0.3, 0.0, 107);
  const Dataset out = perturb(data, {Direction::Bidirectional, 0.0, 99});
  REQUIRE(flipped_ids(data, out).empty());
}

TEST_CASE("bidirectional epsilon 1 swaps every label and mirrors proportions") {
  auto data = testutil::random_dataset(60, 1, 0.25, 0.0, 109);
  const Dataset out = perturb(data, {Direction::Bidirectional, 1.0, 5});
  for (std::size_t i = 0; i < data.size(); ++i)
    REQUIRE(*out.candidates[i].observed_group ==
            other_group(*data.candidates[i].observed_group));
  const auto observed = group_proportions(out.candidates, true);
  const auto truth = group_proportions(out.candidates, false);
  REQUIRE(observed.at(GroupLabel::Disadvantaged) == truth.at(GroupLabel::Advantaged));
}

TEST_CASE("unidirectional flips hit exactly round(eps * |group|) members") {
  std::vector<Candidate> cands;
  for (std::int64_t i = 0; i < 10; ++i)
    cands.push_back(testutil::candidate(i, {0.0}, 0.0, GroupLabel::Disadvantaged));
  for (std::int64_t i = 10; i < 40; ++i)
    cands.push_back(testutil::candidate(i, {0.0}, 0.0, GroupLabel::Advantaged));
  const Dataset data = Dataset::make(std::move(cands), {"f0"});

  const Dataset out = perturb(data, {Direction::DisToAdv, 0.3, 7});
  const auto flips = flipped_ids(data, out);
  REQUIRE(flips.size() == 3);
  for (auto id : flips)
    REQUIRE(data.by_id(id).true_group == GroupLabel::Disadvantaged);

  const Dataset out_adv = perturb(data, {Direction::AdvToDis, 0.5, 7});
  const auto flips_adv = flipped_ids(data, out_adv);
  REQUIRE(flips_adv.size() == 15);
  for (auto id : flips_adv)
    REQUIRE(data.by_id(id).true_group == GroupLabel::Advantaged);
}

TEST_CASE("flip sets are cumulative along the epsilon grid") {
  auto data = testutil::random_dataset(80, 1, 0.35, 0.0, 111);
  for (Direction dir : {Direction::Bidirectional, Direction::DisToAdv, Direction::AdvToDis}) {
    std::set<std::int64_t> previous;
    for (int e = 0; e <= 10; ++e) {
      const Dataset out = perturb(data, {dir, e / 10.0, 4242});
      const auto flips = flipped_ids(data, out);
      REQUIRE(std::includes(flips.begin(), flips.end(), previous.begin(), previous.end()));
      previous = flips;
    }
  }
}

TEST_CASE("exactness of flip counts per targeted group across the grid") {
  auto data = testutil::random_dataset(73, 1, 0.4, 0.0, 113);
  std::size_t n_dis = 0;
  for (const auto& c : data.candidates)
    if (c.true_group == GroupLabel::Disadvantaged) ++n_dis;
  const std::size_t n_adv = data.size() - n_dis;
  for (int e = 0; e <= 10; ++e) {
    const double eps = e / 10.0;
    const Dataset out = perturb(data, {Direction::Bidirectional, eps, 31});
    std::size_t dis_flips = 0, adv_flips = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (*out.candidates[i].observed_group != *data.candidates[i].observed_group) {
        (data.candidates[i].true_group == GroupLabel::Disadvantaged ? dis_flips
                                                                    : adv_flips) += 1;
      }
    }
    REQUIRE(dis_flips == round_count(eps * static_cast<double>(n_dis)));
    REQUIRE(adv_flips == round_count(eps * static_cast<double>(n_adv)));
  }
}

TEST_CASE("bidirectional epsilon 1 applied twice restores the labels") {
  auto data = testutil::random_dataset(30, 1, 0.3, 0.0, 115);
  const NoiseScenario sc{Direction::Bidirectional, 1.0, 77};
  const Dataset once = perturb(data, sc);
  const Dataset twice = perturb(once, sc);
  for (std::size_t i = 0; i < data.size(); ++i)
    REQUIRE(*twice.candidates[i].observed_group == *data.candidates[i].observed_group);
}

TEST_CASE("epsilon outside the unit interval is rejected") {
  auto data = testutil::random_dataset(10, 1, 0.3, 0.0, 117);
  REQUIRE_THROWS(perturb(data, {Direction::Bidirectional, -0.1, 1}));
  REQUIRE_THROWS(perturb(data, {Direction::Bidirectional, 1.1, 1}));
}

TEST_CASE("scenario grid has exactly 47 entries per direction") {
  for (Direction dir : {Direction::Bidirectional, Direction::DisToAdv, Direction::AdvToDis}) {
    const auto grid = scenario_grid(dir, 42);
    REQUIRE(grid.size() == 47);

    // enumeration oracle: 9 interior epsilons x 5 seeds + the two endpoints
    std::map<double, std::set<std::uint64_t>> seeds_at;
    for (const auto& sc : grid) {
      REQUIRE(sc.direction == dir);
      seeds_at[sc.epsilon].insert(sc.seed);
    }
    REQUIRE(seeds_at.size() == 11);
    REQUIRE(seeds_at.at(0.0).size() == 1);
    REQUIRE(seeds_at.at(1.0).size() == 1);
    for (int e = 1; e <= 9; ++e) REQUIRE(seeds_at.at(e / 10.0).size() == 5);
  }
}

TEST_CASE("replicate seeds are shared across epsilons and scoped per direction") {
  const auto grid_a = scenario_grid(Direction::Bidirectional, 42);
  const auto grid_b = scenario_grid(Direction::DisToAdv, 42);
  std::set<std::uint64_t> seeds_a, seeds_b;
  for (const auto& sc : grid_a) seeds_a.insert(sc.seed);
  for (const auto& sc : grid_b) seeds_b.insert(sc.seed);
  REQUIRE(seeds_a.size() == 5);
  REQUIRE(seeds_b.size() == 5);
  for (auto s : seeds_a) REQUIRE(seeds_b.count(s) == 0);
}

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("fairrank_noise_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// a test set shaped like the (W)NBA split: 992 candidates, 218 disadvantaged
Dataset wnba_shaped() {
  std::vector<Candidate> cands;
  std::vector<std::string> names;
  for (std::int64_t i = 0; i < 992; ++i) {
    const GroupLabel g = i < 218 ? GroupLabel::Disadvantaged : GroupLabel::Advantaged;
    cands.push_back(testutil::candidate(i, {0.0}, static_cast<double>(i), g));
    names.push_back("p" + std::to_string(i));
  }
  return Dataset::make(std::move(cands), {"f0"}, std::move(names));
}

}  // namespace

TEST_CASE("fixture bookkeeping reproduces service-style statistics") {
  const Dataset test = wnba_shaped();
  InferenceFixture fixture;
  fixture.service = "svc";
  // 931 correct, 39 incorrect, 22 unknown of which 15 are truly advantaged
  std::size_t incorrect_left = 39, unknown_dis_left = 7, unknown_adv_left = 22 - 7;
  for (const auto& c : test.candidates) {
    FixtureRecord rec;
    rec.id = c.id;
    const bool dis = c.true_group == GroupLabel::Disadvantaged;
    if (dis && unknown_dis_left > 0) {
      --unknown_dis_left;
    } else if (!dis && unknown_adv_left > 0) {
      --unknown_adv_left;
    } else if (incorrect_left > 0) {
      --incorrect_left;
      rec.inferred = other_group(c.true_group);
    } else {
      rec.inferred = c.true_group;
    }
    fixture.records.push_back(rec);
  }

  const auto [resolved, report] = apply_fixture(test, fixture);
  REQUIRE(report.resolved == 970);
  REQUIRE(report.correct == 931);
  REQUIRE(report.incorrect == 39);
  REQUIRE(report.unknown_total == 22);
  REQUIRE(report.unknown_dis == 7);
  REQUIRE(report.unknown_adv == 15);
  REQUIRE(report.effective_error_rate ==
          Catch::Approx((39.0 + 15.0) / 992.0).margin(1e-15));
  // every unknown ended up in the disadvantaged group
  std::size_t unknown_assigned = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!fixture.records[i].inferred) {
      REQUIRE(*resolved.candidates[i].observed_group == GroupLabel::Disadvantaged);
      ++unknown_assigned;
    }
  }
  REQUIRE(unknown_assigned == report.unknown_total);
}

TEST_CASE("an all-correct fixture with no unknowns restores the truth") {
  auto test = testutil::random_dataset(40, 1, 0.3, 0.0, 119);
  InferenceFixture fixture;
  fixture.service = "perfect";
  for (const auto& c : test.candidates)
    fixture.records.push_back({c.id, "", c.true_group});
  const auto [resolved, report] = apply_fixture(test, fixture);
  REQUIRE(report.effective_error_rate == 0.0);
  REQUIRE(report.unknown_total == 0);
  for (std::size_t i = 0; i < test.size(); ++i)
    REQUIRE(*resolved.candidates[i].observed_group == test.candidates[i].true_group);
}

TEST_CASE("random fixtures match the counting oracle") {
  SplitMix64 rng(121);
  auto test = testutil::random_dataset(120, 1, 0.35, 0.0, 123);
  InferenceFixture fixture;
  fixture.service = "random";
  std::size_t expected_incorrect = 0, expected_unknown_adv = 0;
  for (const auto& c : test.candidates) {
    FixtureRecord rec;
    rec.id = c.id;
    const double roll = rng.uniform01();
    if (roll < 0.15) {
      // unknown
      if (c.true_group == GroupLabel::Advantaged) ++expected_unknown_adv;
    } else if (roll < 0.4) {
      rec.inferred = other_group(c.true_group);
      ++expected_incorrect;
    } else {
      rec.inferred = c.true_group;
    }
    fixture.records.push_back(rec);
  }
  const auto [resolved, report] = apply_fixture(test, fixture);
  REQUIRE(report.effective_error_rate ==
          Catch::Approx(static_cast<double>(expected_incorrect + expected_unknown_adv) /
                        static_cast<double>(test.size()))
              .margin(1e-15));
}

TEST_CASE("fixtures missing candidates list the ids") {
  auto test = testutil::random_dataset(10, 1, 0.3, 0.0, 125);
  InferenceFixture fixture;
  fixture.service = "partial";
  for (const auto& c : test.candidates) {
    if (c.id == 3 || c.id == 7) continue;
    fixture.records.push_back({c.id, "", c.true_group});
  }
  REQUIRE_THROWS_WITH(apply_fixture(test, fixture),
                      Catch::Matchers::ContainsSubstring("3") &&
                          Catch::Matchers::ContainsSubstring("7"));
}

TEST_CASE("fixture CSV files parse and join by name when ids are absent") {
  TempDir dir;
  const fs::path path = dir.path / "fixtures.csv";
  {
    std::ofstream out(path);
    out << "id,name,service,inferred_label\n";
    out << "1,alice,svcA,dis\n";
    out << "2,bob,svcA,adv\n";
    out << "3,carol,svcA,unknown\n";
    out << ",alice,svcB,adv\n";
    out << ",bob,svcB,unknown\n";
    out << ",carol,svcB,adv\n";
  }
  const auto fixtures = load_fixtures(path);
  REQUIRE(fixtures.size() == 2);
  REQUIRE(fixtures[0].service == "svcA");
  REQUIRE(fixtures[0].records.size() == 3);
  REQUIRE_FALSE(fixtures[0].records[2].inferred.has_value());

  std::vector<Candidate> cands = {
      testutil::candidate(1, {0.0}, 3.0, GroupLabel::Disadvantaged),
      testutil::candidate(2, {0.0}, 2.0, GroupLabel::Advantaged),
      testutil::candidate(3, {0.0}, 1.0, GroupLabel::Advantaged)};
  const Dataset test = Dataset::make(std::move(cands), {"f0"}, {"alice", "bob", "carol"});
  const auto [resolved, report] = apply_fixture(test, fixtures[1]);
  REQUIRE(report.service == "svcB");
  REQUIRE(*resolved.candidates[0].observed_group == GroupLabel::Advantaged);
  REQUIRE(*resolved.candidates[1].observed_group == GroupLabel::Disadvantaged);  // unknown
  REQUIRE(*resolved.candidates[2].observed_group == GroupLabel::Advantaged);
  // alice misread + bob's unknown lands in dis while truly adv
  REQUIRE(report.effective_error_rate == Catch::Approx(2.0 / 3.0).margin(1e-15));
}

TEST_CASE("bad fixture labels are rejected") {
  TempDir dir;
  const fs::path path = dir.path / "bad.csv";
  std::ofstream(path) << "id,name,service,inferred_label\n1,a,svc,female\n";
  REQUIRE_THROWS(load_fixtures(path));
}
