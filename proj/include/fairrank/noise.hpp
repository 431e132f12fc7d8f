#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairrank/csv.hpp"
#include "fairrank/domain.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

enum class Direction { Bidirectional, DisToAdv, AdvToDis };

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::Bidirectional: return "bidirectional";
    case Direction::DisToAdv: return "dis-to-adv";
    case Direction::AdvToDis: return "adv-to-dis";
  }
  return "?";
}

inline Direction direction_from_string(const std::string& s) {
  if (s == "bidirectional") return Direction::Bidirectional;
  if (s == "dis-to-adv") return Direction::DisToAdv;
  if (s == "adv-to-dis") return Direction::AdvToDis;
  throw std::invalid_argument("unknown direction '" + s +
                              "' (expected bidirectional, dis-to-adv or adv-to-dis)");
}

inline std::size_t direction_index(Direction d) {
  return static_cast<std::size_t>(d);
}

// One perturbed test set: an error direction, an error level and the seed of
// the per-replicate stream.
struct NoiseScenario {
  Direction direction = Direction::Bidirectional;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

// The standard grid for one direction: epsilon 0.1..0.9 with five replicate
// seeds each, plus single scenarios at 0 and 1 (replicates are identical
// there), for 47 scenarios in total. Replicates share one seed across all
// epsilon values, which is what makes the flip sets cumulative.
inline std::vector<NoiseScenario> scenario_grid(Direction direction,
                                                std::uint64_t base_seed) {
  std::vector<NoiseScenario> grid;
  grid.reserve(47);
  const auto seed_for = [&](std::uint64_t replicate) {
    return derive_seed(base_seed, {direction_index(direction), replicate});
  };
  grid.push_back({direction, 0.0, seed_for(0)});
  for (int e = 1; e <= 9; ++e)
    for (std::uint64_t r = 0; r < 5; ++r)
      grid.push_back({direction, static_cast<double>(e) / 10.0, seed_for(r)});
  grid.push_back({direction, 1.0, seed_for(0)});
  return grid;
}

// Flip the observed label of round(epsilon * |g|) members of each targeted
// group. Members are shuffled once per (seed, direction, group), so the flip
// set at a higher epsilon is a superset of the set at a lower one.
inline Dataset perturb(const Dataset& test, const NoiseScenario& scenario) {
  if (!(scenario.epsilon >= 0.0 && scenario.epsilon <= 1.0))
    throw std::invalid_argument("perturb: epsilon outside [0, 1]");

  std::vector<GroupLabel> targets;
  switch (scenario.direction) {
    case Direction::Bidirectional:
      targets = {GroupLabel::Disadvantaged, GroupLabel::Advantaged};
      break;
    case Direction::DisToAdv:
      targets = {GroupLabel::Disadvantaged};
      break;
    case Direction::AdvToDis:
      targets = {GroupLabel::Advantaged};
      break;
  }

  Dataset out = test;
  for (GroupLabel g : targets) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < out.candidates.size(); ++i)
      if (out.candidates[i].true_group == g) members.push_back(i);
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                return out.candidates[a].id < out.candidates[b].id;
              });
    SplitMix64 rng(derive_seed(scenario.seed,
                               {direction_index(scenario.direction),
                                static_cast<std::uint64_t>(g)}));
    rng.shuffle(members);
    const std::size_t flips =
        round_count(scenario.epsilon * static_cast<double>(members.size()));
    for (std::size_t i = 0; i < flips; ++i) {
      Candidate& c = out.candidates[members[i]];
      if (!c.observed_group)
        throw std::runtime_error("perturb: candidate " + std::to_string(c.id) +
                                 " has an unresolved observed group");
      c.observed_group = other_group(*c.observed_group);
    }
  }
  return out;
}

// One record of an offline inference fixture. A missing inferred label is an
// "unknown": the service could not resolve the candidate.
struct FixtureRecord {
  std::optional<std::int64_t> id;
  std::string name;
  std::optional<GroupLabel> inferred;
};

struct InferenceFixture {
  std::string service;
  std::vector<FixtureRecord> records;
};

// Fixture CSV format: id,name,service,inferred_label with inferred_label in
// {dis, adv, unknown}. The id field may be empty when joining by name.
inline std::vector<InferenceFixture> load_fixtures(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::size_t id_ix = table.column("id");
  const std::size_t name_ix = table.column("name");
  const std::size_t service_ix = table.column("service");
  const std::size_t label_ix = table.column("inferred_label");

  std::vector<InferenceFixture> fixtures;
  std::map<std::string, std::size_t> by_service;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    FixtureRecord rec;
    if (!row[id_ix].empty())
      rec.id = parse_int64(row[id_ix], "fixture line " + std::to_string(r + 2));
    rec.name = row[name_ix];
    const std::string& label = row[label_ix];
    if (label == "unknown") {
      rec.inferred = std::nullopt;
    } else {
      rec.inferred = group_from_string(label);
    }
    const std::string& service = row[service_ix];
    auto [it, inserted] = by_service.emplace(service, fixtures.size());
    if (inserted) fixtures.push_back({service, {}});
    fixtures[it->second].records.push_back(std::move(rec));
  }
  if (fixtures.empty())
    throw std::runtime_error("fixture file has no records: " + path.string());
  return fixtures;
}

struct FixtureReport {
  std::string service;
  std::size_t n = 0;
  std::size_t resolved = 0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t unknown_total = 0;  // all assigned to the disadvantaged label
  std::size_t unknown_dis = 0;    // unknowns whose true group is disadvantaged
  std::size_t unknown_adv = 0;
  double effective_error_rate = 0.0;  // (incorrect + misassigned unknowns) / n
};

// Resolve observed groups from a fixture. Unknowns are assigned dis_label;
// the report tracks how that changes the effective error rate.
inline std::pair<Dataset, FixtureReport> apply_fixture(const Dataset& test,
                                                       const InferenceFixture& fixture,
                                                       GroupLabel dis_label = GroupLabel::Disadvantaged) {
  std::unordered_map<std::int64_t, const FixtureRecord*> by_id;
  std::unordered_map<std::string, const FixtureRecord*> by_name;
  for (const auto& rec : fixture.records) {
    if (rec.id) {
      if (!by_id.emplace(*rec.id, &rec).second)
        throw std::runtime_error("fixture '" + fixture.service +
                                 "' lists candidate id " + std::to_string(*rec.id) +
                                 " more than once");
    } else if (!rec.name.empty()) {
      if (!by_name.emplace(rec.name, &rec).second)
        throw std::runtime_error("fixture '" + fixture.service + "' lists name '" +
                                 rec.name + "' more than once");
    }
  }

  Dataset out = test;
  FixtureReport report;
  report.service = fixture.service;
  report.n = test.size();
  std::vector<std::int64_t> missing;
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    Candidate& c = out.candidates[i];
    const FixtureRecord* rec = nullptr;
    if (auto it = by_id.find(c.id); it != by_id.end()) {
      rec = it->second;
    } else if (!out.names.empty()) {
      if (auto nt = by_name.find(out.names[i]); nt != by_name.end()) rec = nt->second;
    }
    if (!rec) {
      missing.push_back(c.id);
      continue;
    }
    if (rec->inferred) {
      c.observed_group = *rec->inferred;
      ++report.resolved;
      (*rec->inferred == c.true_group ? report.correct : report.incorrect) += 1;
    } else {
      c.observed_group = dis_label;
      ++report.unknown_total;
      (c.true_group == GroupLabel::Disadvantaged ? report.unknown_dis
                                                 : report.unknown_adv) += 1;
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i)
      list += (list.empty() ? "" : ", ") + std::to_string(missing[i]);
    if (missing.size() > 20) list += ", ...";
    throw std::runtime_error("fixture '" + fixture.service + "' is missing " +
                             std::to_string(missing.size()) + " test candidate(s): " + list);
  }

  const std::size_t misassigned_unknowns = dis_label == GroupLabel::Disadvantaged
                                               ? report.unknown_adv
                                               : report.unknown_dis;
  report.effective_error_rate =
      static_cast<double>(report.incorrect + misassigned_unknowns) /
      static_cast<double>(report.n);
  return {std::move(out), report};
}

}  // namespace fairrank
