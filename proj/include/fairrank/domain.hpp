#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fairrank {

// Binary protected group. Experiments in this library are binary by
// construction; "unknown" is a resolvable state of the observation, not a
// third group (see Candidate::observed_group).
enum class GroupLabel { Disadvantaged, Advantaged };

inline GroupLabel other_group(GroupLabel g) {
  return g == GroupLabel::Disadvantaged ? GroupLabel::Advantaged
                                        : GroupLabel::Disadvantaged;
}

inline const char* to_string(GroupLabel g) {
  return g == GroupLabel::Disadvantaged ? "dis" : "adv";
}

inline GroupLabel group_from_string(const std::string& s) {
  if (s == "dis") return GroupLabel::Disadvantaged;
  if (s == "adv") return GroupLabel::Advantaged;
  throw std::invalid_argument("unknown group label '" + s +
                              "' (expected 'dis' or 'adv')");
}

// One rankable item. observed_group is nullopt while inference has not
// resolved the candidate; every fairness-aware computation requires it to be
// resolved first and throws otherwise.
struct Candidate {
  std::int64_t id = 0;
  std::vector<double> features;
  double judgment = 0.0;
  GroupLabel true_group = GroupLabel::Advantaged;
  std::optional<GroupLabel> observed_group;
};

struct RankedItem {
  std::int64_t id = 0;
  double score = 0.0;
};

// An ordered permutation of a candidate set. Position j is items[j - 1];
// positions are 1-based and top is best.
struct Ranking {
  std::vector<RankedItem> items;

  std::size_t size() const { return items.size(); }

  std::vector<std::int64_t> order() const {
    std::vector<std::int64_t> ids;
    ids.reserve(items.size());
    for (const auto& it : items) ids.push_back(it.id);
    return ids;
  }

  // 1-based position of a candidate; throws if absent.
  std::size_t position_of(std::int64_t id) const {
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].id == id) return i + 1;
    throw std::out_of_range("candidate " + std::to_string(id) +
                            " not present in ranking");
  }
};

// Sort descending by score, ties broken by ascending id. The tie rule makes
// every downstream ranking operation deterministic.
inline Ranking rank_by_score(std::vector<RankedItem> scored) {
  for (const auto& it : scored) {
    if (!std::isfinite(it.score)) {
      throw std::invalid_argument("rank_by_score: non-finite score for candidate " +
                                  std::to_string(it.id));
    }
  }
  std::sort(scored.begin(), scored.end(),
            [](const RankedItem& a, const RankedItem& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
  return Ranking{std::move(scored)};
}

inline std::map<GroupLabel, double> group_proportions(
    const std::vector<Candidate>& candidates, bool use_observed) {
  if (candidates.empty())
    throw std::invalid_argument("group_proportions: empty candidate list");
  std::map<GroupLabel, double> counts{{GroupLabel::Disadvantaged, 0.0},
                                      {GroupLabel::Advantaged, 0.0}};
  for (const auto& c : candidates) {
    GroupLabel g = c.true_group;
    if (use_observed) {
      if (!c.observed_group) {
        throw std::runtime_error(
            "group_proportions: candidate " + std::to_string(c.id) +
            " has an unresolved observed group; resolve unknowns first "
            "(noise::apply_fixture or noise::perturb)");
      }
      g = *c.observed_group;
    }
    counts[g] += 1.0;
  }
  for (auto& [g, v] : counts) v /= static_cast<double>(candidates.size());
  return counts;
}

// Immutable-by-convention candidate collection. `proportions` is fixed at
// construction from true groups and always sums to 1.
struct Dataset {
  std::vector<Candidate> candidates;
  std::vector<std::string> feature_names;
  std::vector<std::string> names;  // aligned with candidates; may be empty
  std::map<GroupLabel, double> proportions;

  static Dataset make(std::vector<Candidate> candidates,
                      std::vector<std::string> feature_names,
                      std::vector<std::string> names = {}) {
    if (candidates.empty())
      throw std::invalid_argument("Dataset: no candidates");
    std::unordered_map<std::int64_t, std::size_t> seen;
    seen.reserve(candidates.size());
    std::size_t dis = 0, adv = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const Candidate& c = candidates[i];
      if (!seen.emplace(c.id, i).second)
        throw std::invalid_argument("Dataset: duplicate candidate id " +
                                    std::to_string(c.id));
      if (c.features.size() != feature_names.size())
        throw std::invalid_argument(
            "Dataset: candidate " + std::to_string(c.id) + " has " +
            std::to_string(c.features.size()) + " features, expected " +
            std::to_string(feature_names.size()));
      if (!std::isfinite(c.judgment))
        throw std::invalid_argument("Dataset: non-finite judgment for candidate " +
                                    std::to_string(c.id));
      (c.true_group == GroupLabel::Disadvantaged ? dis : adv) += 1;
    }
    if (dis == 0 || adv == 0)
      throw std::invalid_argument("Dataset: both groups need at least one member");
    if (!names.empty() && names.size() != candidates.size())
      throw std::invalid_argument("Dataset: name list size mismatch");

    Dataset d;
    d.proportions = group_proportions(candidates, /*use_observed=*/false);
    d.candidates = std::move(candidates);
    d.feature_names = std::move(feature_names);
    d.names = std::move(names);
    d.index_ = std::move(seen);
    return d;
  }

  std::size_t size() const { return candidates.size(); }

  std::size_t index_of(std::int64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw std::out_of_range("Dataset: unknown candidate id " + std::to_string(id));
    return it->second;
  }

  const Candidate& by_id(std::int64_t id) const { return candidates[index_of(id)]; }

 private:
  std::unordered_map<std::int64_t, std::size_t> index_;
};

}  // namespace fairrank
