#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/domain.hpp"

namespace fairrank {

// Target representation per group; values sum to 1 and every present group
// needs a positive share.
struct TargetProportions {
  std::map<GroupLabel, double> p;

  static TargetProportions of(double dis, double adv) {
    TargetProportions t;
    t.p[GroupLabel::Disadvantaged] = dis;
    t.p[GroupLabel::Advantaged] = adv;
    t.validate();
    return t;
  }

  TargetProportions mirrored() const {
    return of(p.at(GroupLabel::Advantaged), p.at(GroupLabel::Disadvantaged));
  }

  void validate() const {
    double sum = 0.0;
    for (const auto& [g, v] : p) {
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("target proportion out of [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("target proportions must sum to 1");
  }
};

// Target = the observed-group composition of the test set.
inline TargetProportions target_from_observed(const Dataset& test) {
  TargetProportions t;
  t.p = group_proportions(test.candidates, /*use_observed=*/true);
  t.validate();
  return t;
}

struct ConstrainedItem {
  std::int64_t id = 0;
  double score = 0.0;
  std::size_t group = 0;
};

// Constrained re-ranking: permutes a score-descending input list so that for
// every group g and every prefix k <= k_max, the prefix holds at least
// floor(p[g] * k) members of g.
//
// Mechanics: per-group queues keep the input order. Walking k upward, any
// group whose floor rose gets its next queued candidate appended (highest
// pending score first; ties by group index, then id). Each appended
// candidate then swaps upward while the item above it scores lower and can
// move down without leaving the prefix it was owed in — the per-item
// "owed-k" bound is what keeps every prefix floor intact across swaps.
inline std::vector<ConstrainedItem> det_const_sort(
    const std::vector<ConstrainedItem>& input, std::span<const double> target,
    std::size_t k_max) {
  const std::size_t n = input.size();
  const std::size_t n_groups = target.size();
  if (n == 0) throw std::invalid_argument("det_const_sort: empty input");
  if (k_max > n)
    throw std::invalid_argument("det_const_sort: k_max exceeds the list length");
  double sum = 0.0;
  for (double p : target) {
    if (p < 0.0) throw std::invalid_argument("det_const_sort: negative proportion");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("det_const_sort: proportions must sum to 1");
  for (const auto& item : input)
    if (item.group >= n_groups)
      throw std::invalid_argument("det_const_sort: group index out of range");

  std::vector<std::vector<std::size_t>> queue(n_groups);
  for (std::size_t i = 0; i < n; ++i) queue[input[i].group].push_back(i);
  std::vector<std::size_t> head(n_groups, 0);

  struct Slot {
    std::size_t item;    // index into input
    std::size_t owed_k;  // 1-based prefix this item must stay within
  };
  std::vector<Slot> slots;
  slots.reserve(k_max);
  std::vector<std::size_t> min_counts(n_groups, 0);

  std::size_t k = 0;
  while (slots.size() < k_max) {
    ++k;
    bool any_supply = false;
    for (std::size_t g = 0; g < n_groups; ++g)
      if (target[g] > 0.0 && head[g] < queue[g].size()) any_supply = true;
    if (!any_supply)
      throw std::invalid_argument(
          "det_const_sort: groups with zero target proportion cannot fill the "
          "remaining positions");

    std::vector<std::size_t> owed;
    std::size_t owed_total = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      const auto floor_g = static_cast<std::size_t>(
          std::floor(target[g] * static_cast<double>(k)));
      owed_total += floor_g;
      if (floor_g <= min_counts[g]) continue;
      if (head[g] >= queue[g].size()) {
        // Group exhausted. Within k_max this floor can never be met; beyond
        // k_max the prefix no longer exists in the output.
        if (k <= k_max)
          throw std::invalid_argument(
              "det_const_sort: target proportion for group " + std::to_string(g) +
              " requires more candidates than exist (prefix " + std::to_string(k) + ")");
        min_counts[g] = floor_g;
        continue;
      }
      owed.push_back(g);
    }
    if (owed_total > k)
      throw std::logic_error("det_const_sort: floors exceed the prefix length");

    std::sort(owed.begin(), owed.end(), [&](std::size_t a, std::size_t b) {
      const auto& ia = input[queue[a][head[a]]];
      const auto& ib = input[queue[b][head[b]]];
      if (ia.score != ib.score) return ia.score > ib.score;
      if (a != b) return a < b;
      return ia.id < ib.id;
    });

    for (std::size_t g : owed) {
      slots.push_back({queue[g][head[g]++], k});
      min_counts[g] += 1;
      std::size_t j = slots.size() - 1;
      while (j > 0 && slots[j - 1].owed_k >= j + 1 &&
             input[slots[j - 1].item].score < input[slots[j].item].score) {
        std::swap(slots[j - 1], slots[j]);
        --j;
      }
      if (slots.size() == k_max) break;
    }
  }

  std::vector<ConstrainedItem> output;
  output.reserve(n);
  for (const auto& slot : slots) output.push_back(input[slot.item]);
  // Anything never owed within k_max trails in input order.
  std::vector<std::size_t> rest;
  for (std::size_t g = 0; g < n_groups; ++g)
    for (std::size_t i = head[g]; i < queue[g].size(); ++i) rest.push_back(queue[g][i]);
  std::sort(rest.begin(), rest.end());
  for (std::size_t i : rest) output.push_back(input[i]);
  return output;
}

// Typed wrapper over a Ranking and a test set's observed labels.
// k_max is normally the full list length.
inline Ranking det_const_sort(const Ranking& input, const Dataset& test,
                              const TargetProportions& target, std::size_t k_max) {
  target.validate();
  std::vector<ConstrainedItem> items;
  items.reserve(input.size());
  bool present[2] = {false, false};
  for (const auto& it : input.items) {
    const Candidate& c = test.by_id(it.id);
    if (!c.observed_group)
      throw std::runtime_error("det_const_sort: candidate " + std::to_string(c.id) +
                               " has an unresolved observed group");
    const std::size_t g = *c.observed_group == GroupLabel::Disadvantaged ? 0u : 1u;
    present[g] = true;
    items.push_back({it.id, it.score, g});
  }
  for (const auto& [g, v] : target.p)
    if (present[g == GroupLabel::Disadvantaged ? 0 : 1] && !(v > 0.0))
      throw std::invalid_argument(std::string("det_const_sort: group '") +
                                  to_string(g) +
                                  "' is present but has zero target proportion");
  const double target_arr[2] = {target.p.at(GroupLabel::Disadvantaged),
                                target.p.at(GroupLabel::Advantaged)};
  auto reranked = det_const_sort(items, std::span<const double>(target_arr, 2), k_max);
  Ranking out;
  out.items.reserve(reranked.size());
  for (const auto& it : reranked) out.items.push_back({it.id, it.score});
  return out;
}

}  // namespace fairrank
