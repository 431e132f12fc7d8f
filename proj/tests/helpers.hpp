#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairrank/domain.hpp"
#include "fairrank/rng.hpp"

namespace testutil {

using fairrank::Candidate;
using fairrank::Dataset;
using fairrank::GroupLabel;

inline Candidate candidate(std::int64_t id, std::vector<double> features,
                           double judgment, GroupLabel group) {
  Candidate c;
  c.id = id;
  c.features = std::move(features);
  c.judgment = judgment;
  c.true_group = group;
  c.observed_group = group;
  return c;
}

// n candidates, d standard-normal features, judgment = first feature plus an
// optional penalty against the disadvantaged group.
inline Dataset random_dataset(std::size_t n, std::size_t d, double dis_fraction,
                              double penalty, std::uint64_t seed) {
  fairrank::SplitMix64 rng(seed);
  std::vector<Candidate> cands;
  std::size_t n_dis = std::max<std::size_t>(1, static_cast<std::size_t>(dis_fraction * n));
  if (n_dis >= n) n_dis = n - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const GroupLabel g = i < n_dis ? GroupLabel::Disadvantaged : GroupLabel::Advantaged;
    std::vector<double> x;
    for (std::size_t j = 0; j < d; ++j) x.push_back(rng.normal());
    const double judgment = x[0] - (g == GroupLabel::Disadvantaged ? penalty : 0.0) +
                            0.05 * rng.normal();
    cands.push_back(candidate(static_cast<std::int64_t>(i + 1), std::move(x), judgment, g));
  }
  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < d; ++j) feature_names.push_back("f" + std::to_string(j));
  return Dataset::make(std::move(cands), std::move(feature_names));
}

}  // namespace testutil
