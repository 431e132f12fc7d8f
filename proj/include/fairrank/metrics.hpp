#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairrank/domain.hpp"

namespace fairrank {

// Positional attention weight of a 1-based rank position: 1/log2(pos + 1).
// Position 1 gets exposure 1.0.
inline double position_exposure(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

// The NDKL sum can read the prefix distribution at every rank i (the
// standard reading, default) or the fixed top-k distribution at every term.
enum class NdklVariant { PrefixAtEachRank, LiteralTopK };

// NDCG can normalize by the ideal ordering's DCG (default; the ideal
// ordering then scores exactly 1) or by the bare discount mass sum(1/log2(i+1)).
enum class NdcgVariant { IdcgNormalized, DiscountMassNormalized };

inline std::map<GroupLabel, double> base_distribution(
    std::span<const GroupLabel> groups) {
  if (groups.empty()) throw std::invalid_argument("base_distribution: empty ranking");
  std::map<GroupLabel, double> p{{GroupLabel::Disadvantaged, 0.0},
                                 {GroupLabel::Advantaged, 0.0}};
  for (GroupLabel g : groups) p[g] += 1.0;
  for (auto& [g, v] : p) v /= static_cast<double>(groups.size());
  return p;
}

// Skew_g@k: the group's share of the top-k divided by its share of the whole
// set. 1 is proportional; below 1 the group is under-represented.
inline double skew(std::span<const GroupLabel> rank_groups, GroupLabel g,
                   std::size_t k, const std::map<GroupLabel, double>& base) {
  if (k < 1 || k > rank_groups.size())
    throw std::invalid_argument("skew: k out of range [1, n]");
  const double pc = base.at(g);
  if (!(pc > 0.0))
    throw std::invalid_argument("skew: group has zero base proportion");
  std::size_t in_group = 0;
  for (std::size_t i = 0; i < k; ++i)
    if (rank_groups[i] == g) ++in_group;
  return (static_cast<double>(in_group) / static_cast<double>(k)) / pc;
}

inline double skew(std::span<const GroupLabel> rank_groups, GroupLabel g,
                   std::size_t k) {
  return skew(rank_groups, g, k, base_distribution(rank_groups));
}

// Discount-weighted average of prefix KL divergences (bits) against the base
// distribution. Zero-count groups contribute nothing (0*log convention).
inline double ndkl(std::span<const GroupLabel> rank_groups, std::size_t k,
                   const std::map<GroupLabel, double>& base,
                   NdklVariant variant = NdklVariant::PrefixAtEachRank) {
  if (k < 1 || k > rank_groups.size())
    throw std::invalid_argument("ndkl: k out of range [1, n]");

  auto kl_at = [&](std::size_t prefix, std::size_t dis_count) {
    double kl = 0.0;
    const double n = static_cast<double>(prefix);
    const double p_dis = static_cast<double>(dis_count) / n;
    const double p_adv = 1.0 - p_dis;
    if (p_dis > 0.0) kl += p_dis * std::log2(p_dis / base.at(GroupLabel::Disadvantaged));
    if (p_adv > 0.0) kl += p_adv * std::log2(p_adv / base.at(GroupLabel::Advantaged));
    return kl;
  };

  std::size_t dis_total = 0;
  for (std::size_t i = 0; i < k; ++i)
    if (rank_groups[i] == GroupLabel::Disadvantaged) ++dis_total;

  double z = 0.0;
  double acc = 0.0;
  std::size_t dis_running = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (rank_groups[i - 1] == GroupLabel::Disadvantaged) ++dis_running;
    const double discount = 1.0 / std::log2(static_cast<double>(i) + 1.0);
    z += discount;
    const double term = variant == NdklVariant::PrefixAtEachRank
                            ? kl_at(i, dis_running)
                            : kl_at(k, dis_total);
    acc += discount * term;
  }
  return acc / z;
}

inline double ndkl(std::span<const GroupLabel> rank_groups, std::size_t k,
                   NdklVariant variant = NdklVariant::PrefixAtEachRank) {
  return ndkl(rank_groups, k, base_distribution(rank_groups), variant);
}

inline std::map<GroupLabel, double> average_exposure(
    std::span<const GroupLabel> rank_groups) {
  std::map<GroupLabel, double> total{{GroupLabel::Disadvantaged, 0.0},
                                     {GroupLabel::Advantaged, 0.0}};
  std::map<GroupLabel, std::size_t> count{{GroupLabel::Disadvantaged, 0},
                                          {GroupLabel::Advantaged, 0}};
  for (std::size_t i = 0; i < rank_groups.size(); ++i) {
    total[rank_groups[i]] += position_exposure(i + 1);
    count[rank_groups[i]] += 1;
  }
  for (auto& [g, v] : total) {
    if (count[g] == 0)
      throw std::invalid_argument(std::string("average_exposure: group '") +
                                  to_string(g) + "' absent from ranking");
    v /= static_cast<double>(count[g]);
  }
  return total;
}

// Mean exposure of the disadvantaged group over the advantaged group's.
// 1 is parity; below 1 the disadvantaged group is under-exposed.
inline double exposure_ratio(std::span<const GroupLabel> rank_groups) {
  auto exp = average_exposure(rank_groups);
  return exp.at(GroupLabel::Disadvantaged) / exp.at(GroupLabel::Advantaged);
}

// NDCG@k over ground-truth judgments in ranked order. Negative judgments are
// shifted up to zero first (the shift is reported via MetricReport).
inline double ndcg(std::span<const double> judgments_in_rank_order, std::size_t k,
                   NdcgVariant variant = NdcgVariant::IdcgNormalized) {
  const std::size_t n = judgments_in_rank_order.size();
  if (k < 1 || k > n) throw std::invalid_argument("ndcg: k out of range [1, n]");
  double shift = 0.0;
  for (double j : judgments_in_rank_order)
    if (j < -shift) shift = -j;

  double dcg = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    dcg += (judgments_in_rank_order[i] + shift) / std::log2(static_cast<double>(i) + 2.0);

  if (variant == NdcgVariant::DiscountMassNormalized) {
    double z = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      z += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    return dcg / z;
  }

  std::vector<double> ideal(judgments_in_rank_order.begin(), judgments_in_rank_order.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    idcg += (ideal[i] + shift) / std::log2(static_cast<double>(i) + 2.0);
  if (!(idcg > 0.0))
    throw std::domain_error("ndcg: ideal top-k judgments are all zero");
  return dcg / idcg;
}

inline std::vector<GroupLabel> true_groups_in_rank_order(const Ranking& ranking,
                                                         const Dataset& data) {
  std::vector<GroupLabel> groups;
  groups.reserve(ranking.size());
  for (const auto& item : ranking.items)
    groups.push_back(data.by_id(item.id).true_group);
  return groups;
}

inline std::vector<double> judgments_in_rank_order(const Ranking& ranking,
                                                   const Dataset& data) {
  std::vector<double> j;
  j.reserve(ranking.size());
  for (const auto& item : ranking.items) j.push_back(data.by_id(item.id).judgment);
  return j;
}

// All four measures for one ranking, against true groups and raw judgments.
// Cutoffs larger than the ranking are clamped to n.
struct MetricReport {
  std::map<std::size_t, std::map<GroupLabel, double>> skew_at;
  double ndkl = 0.0;  // evaluated at k = n
  std::map<GroupLabel, double> avg_exposure;
  double dadv_adv_ratio = 0.0;
  std::map<std::size_t, double> ndcg_at;
  double judgment_shift = 0.0;  // nonzero when raw judgments were negative
};

inline MetricReport compute_report(const Ranking& ranking, const Dataset& data,
                                   const std::vector<std::size_t>& cutoffs = {10, 50, 100},
                                   NdklVariant ndkl_variant = NdklVariant::PrefixAtEachRank,
                                   NdcgVariant ndcg_variant = NdcgVariant::IdcgNormalized) {
  const auto groups = true_groups_in_rank_order(ranking, data);
  const auto judgments = judgments_in_rank_order(ranking, data);
  const auto base = base_distribution(groups);
  const std::size_t n = groups.size();

  MetricReport report;
  for (std::size_t k : cutoffs) {
    const std::size_t kk = std::min(k, n);
    report.skew_at[kk][GroupLabel::Disadvantaged] =
        skew(groups, GroupLabel::Disadvantaged, kk, base);
    report.skew_at[kk][GroupLabel::Advantaged] =
        skew(groups, GroupLabel::Advantaged, kk, base);
    report.ndcg_at[kk] = ndcg(judgments, kk, ndcg_variant);
  }
  report.ndkl = ndkl(groups, n, base, ndkl_variant);
  report.avg_exposure = average_exposure(groups);
  report.dadv_adv_ratio = report.avg_exposure.at(GroupLabel::Disadvantaged) /
                          report.avg_exposure.at(GroupLabel::Advantaged);
  for (double j : judgments)
    if (j < -report.judgment_shift) report.judgment_shift = -j;
  return report;
}

}  // namespace fairrank
