#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/csv.hpp"
#include "fairrank/domain.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

// Column mapping for arbitrary CSV datasets. disadvantaged_value is the raw
// group-column value mapped to GroupLabel::Disadvantaged; the single other
// distinct value maps to Advantaged.
struct DatasetSchema {
  std::string id_column;
  std::string judgment_column;
  std::string group_column;
  std::string disadvantaged_value;
  std::vector<std::string> feature_columns;
  std::optional<std::string> name_column;  // only used to join inference fixtures

  void validate() const {
    if (feature_columns.empty())
      throw std::invalid_argument("schema: feature_columns must not be empty");
    std::set<std::string> seen;
    auto check = [&](const std::string& col) {
      if (col.empty()) throw std::invalid_argument("schema: empty column name");
      if (!seen.insert(col).second)
        throw std::invalid_argument("schema: column '" + col + "' listed twice");
    };
    check(id_column);
    check(judgment_column);
    check(group_column);
    for (const auto& f : feature_columns) check(f);
    if (name_column) check(*name_column);
  }
};

inline Dataset load_dataset(const std::filesystem::path& csv_path,
                            const DatasetSchema& schema) {
  schema.validate();
  const CsvTable table = read_csv(csv_path);

  std::vector<std::string> missing;
  auto require = [&](const std::string& col) -> std::size_t {
    if (!table.has_column(col)) {
      missing.push_back(col);
      return 0;
    }
    return table.column(col);
  };
  const std::size_t id_ix = require(schema.id_column);
  const std::size_t judgment_ix = require(schema.judgment_column);
  const std::size_t group_ix = require(schema.group_column);
  std::vector<std::size_t> feature_ix;
  for (const auto& f : schema.feature_columns) feature_ix.push_back(require(f));
  std::optional<std::size_t> name_ix;
  if (schema.name_column) name_ix = require(*schema.name_column);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw std::runtime_error("schema error: missing column(s) " + list + " in " +
                             csv_path.string());
  }

  std::set<std::string> group_values;
  for (const auto& row : table.rows) group_values.insert(row[group_ix]);
  if (group_values.size() != 2) {
    std::string list;
    for (const auto& v : group_values)
      list += (list.empty() ? std::string() : std::string(", ")) + "'" + v + "'";
    throw std::runtime_error("group column '" + schema.group_column + "' has " +
                             std::to_string(group_values.size()) +
                             " distinct values (" + list + "), expected exactly 2");
  }
  if (!group_values.count(schema.disadvantaged_value))
    throw std::runtime_error("disadvantaged value '" + schema.disadvantaged_value +
                             "' never occurs in group column '" + schema.group_column + "'");

  std::vector<Candidate> candidates;
  std::vector<std::string> names;
  candidates.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string line = "line " + std::to_string(r + 2);
    Candidate c;
    c.id = parse_int64(row[id_ix], line + ", column '" + schema.id_column + "'");
    c.judgment = parse_double(row[judgment_ix], line + ", column '" + schema.judgment_column + "'");
    for (std::size_t f = 0; f < feature_ix.size(); ++f)
      c.features.push_back(parse_double(row[feature_ix[f]],
                                        line + ", column '" + schema.feature_columns[f] + "'"));
    c.true_group = row[group_ix] == schema.disadvantaged_value
                       ? GroupLabel::Disadvantaged
                       : GroupLabel::Advantaged;
    c.observed_group = c.true_group;
    candidates.push_back(std::move(c));
    if (name_ix) names.push_back(row[*name_ix]);
  }

  // both groups occur at least once because the column holds exactly two
  // values; a split later insists on more per group and says so
  return Dataset::make(std::move(candidates), schema.feature_columns, std::move(names));
}

// Seeded uniform shuffle, then |train| = round(fraction * n) with round-half-up.
// Both splits must keep at least one member of each group.
inline std::pair<Dataset, Dataset> split_train_test(const Dataset& data,
                                                    double fraction,
                                                    std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("split fraction must be in (0, 1)");
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  rng.shuffle(order);

  std::size_t n_train = round_count(fraction * static_cast<double>(n));
  n_train = std::max<std::size_t>(1, std::min(n_train, n - 1));

  auto build = [&](std::size_t begin, std::size_t end) {
    std::vector<Candidate> cands;
    std::vector<std::string> names;
    cands.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      cands.push_back(data.candidates[order[i]]);
      if (!data.names.empty()) names.push_back(data.names[order[i]]);
    }
    std::size_t dis = 0;
    for (const auto& c : cands)
      if (c.true_group == GroupLabel::Disadvantaged) ++dis;
    if (dis == 0 || dis == cands.size())
      throw std::runtime_error(
          "split leaves a group empty on one side; try a different split seed");
    return Dataset::make(std::move(cands), data.feature_names, std::move(names));
  };
  Dataset train = build(0, n_train);
  Dataset test = build(n_train, n);
  return {std::move(train), std::move(test)};
}

struct FeatureStat {
  std::string name;
  double mean = 0.0;
  double sd = 1.0;
  bool dropped = false;  // zero variance on the training split
};

// Z-score statistics for features and min-max bounds for judgments, fitted on
// the training split only. An empty stats object means "leave features as
// they are" and is what hand-built datasets use.
struct NormalizationStats {
  std::vector<FeatureStat> features;
  double judgment_min = 0.0;
  double judgment_max = 1.0;

  bool empty() const { return features.empty(); }

  std::vector<std::string> retained_names() const {
    std::vector<std::string> out;
    for (const auto& f : features)
      if (!f.dropped) out.push_back(f.name);
    return out;
  }
};

inline NormalizationStats fit_normalization(const Dataset& train) {
  if (train.candidates.empty())
    throw std::invalid_argument("fit_normalization: empty training set");
  const std::size_t n = train.size();
  const std::size_t d = train.feature_names.size();

  NormalizationStats stats;
  for (std::size_t j = 0; j < d; ++j) {
    FeatureStat fs;
    fs.name = train.feature_names[j];
    double sum = 0.0;
    for (const auto& c : train.candidates) sum += c.features[j];
    fs.mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (const auto& c : train.candidates) {
      const double delta = c.features[j] - fs.mean;
      var += delta * delta;
    }
    var /= static_cast<double>(n);
    fs.sd = std::sqrt(var);
    if (fs.sd < 1e-12) {
      fs.dropped = true;
      fs.sd = 1.0;
    }
    stats.features.push_back(fs);
  }

  stats.judgment_min = train.candidates.front().judgment;
  stats.judgment_max = stats.judgment_min;
  for (const auto& c : train.candidates) {
    stats.judgment_min = std::min(stats.judgment_min, c.judgment);
    stats.judgment_max = std::max(stats.judgment_max, c.judgment);
  }
  if (stats.judgment_max - stats.judgment_min < 1e-12)
    throw std::runtime_error(
        "degenerate judgment target: max equals min on the training split");
  return stats;
}

inline std::vector<double> normalize_features(const NormalizationStats& stats,
                                              std::span<const double> raw) {
  if (stats.empty()) return {raw.begin(), raw.end()};
  if (raw.size() != stats.features.size())
    throw std::invalid_argument("normalize_features: expected " +
                                std::to_string(stats.features.size()) +
                                " raw features, got " + std::to_string(raw.size()));
  std::vector<double> out;
  out.reserve(stats.features.size());
  for (std::size_t j = 0; j < stats.features.size(); ++j) {
    if (stats.features[j].dropped) continue;
    out.push_back((raw[j] - stats.features[j].mean) / stats.features[j].sd);
  }
  return out;
}

// Inverse of normalize_features; dropped columns come back at their training
// mean (they were constant there).
inline std::vector<double> denormalize_features(const NormalizationStats& stats,
                                                std::span<const double> normalized) {
  if (stats.empty()) return {normalized.begin(), normalized.end()};
  std::vector<double> out;
  out.reserve(stats.features.size());
  std::size_t k = 0;
  for (const auto& fs : stats.features) {
    if (fs.dropped) {
      out.push_back(fs.mean);
    } else {
      if (k >= normalized.size())
        throw std::invalid_argument("denormalize_features: vector too short");
      out.push_back(normalized[k++] * fs.sd + fs.mean);
    }
  }
  if (k != normalized.size())
    throw std::invalid_argument("denormalize_features: vector too long");
  return out;
}

inline double normalize_judgment(const NormalizationStats& stats, double judgment) {
  return (judgment - stats.judgment_min) / (stats.judgment_max - stats.judgment_min);
}

inline Dataset apply_normalization(const Dataset& data, const NormalizationStats& stats) {
  std::vector<Candidate> cands;
  cands.reserve(data.size());
  for (const auto& c : data.candidates) {
    Candidate out = c;
    out.features = normalize_features(stats, c.features);
    out.judgment = normalize_judgment(stats, c.judgment);
    cands.push_back(std::move(out));
  }
  return Dataset::make(std::move(cands), stats.retained_names(), data.names);
}

// Rank by descending ground-truth judgment, compute each group's skew at
// every prefix k in the top half and return the group with the smaller mean
// skew. "Nearly all positions" from the source criterion is operationalized
// as this mean comparison; exact ties require an explicit override.
inline GroupLabel detect_disadvantaged_group(const Dataset& data) {
  std::vector<RankedItem> scored;
  scored.reserve(data.size());
  for (const auto& c : data.candidates) scored.push_back({c.id, c.judgment});
  const Ranking ranked = rank_by_score(std::move(scored));

  const std::size_t n = data.size();
  const std::size_t k_top = (n + 1) / 2;  // ceil(n / 2)
  const double p_dis = data.proportions.at(GroupLabel::Disadvantaged);
  const double p_adv = data.proportions.at(GroupLabel::Advantaged);

  double mean_dis = 0.0, mean_adv = 0.0;
  std::size_t dis_count = 0;
  for (std::size_t k = 1; k <= k_top; ++k) {
    if (data.by_id(ranked.items[k - 1].id).true_group == GroupLabel::Disadvantaged)
      ++dis_count;
    const double share_dis = static_cast<double>(dis_count) / static_cast<double>(k);
    mean_dis += share_dis / p_dis;
    mean_adv += (1.0 - share_dis) / p_adv;
  }
  mean_dis /= static_cast<double>(k_top);
  mean_adv /= static_cast<double>(k_top);

  if (std::abs(mean_dis - mean_adv) < 1e-12)
    throw std::runtime_error(
        "disadvantaged-group detection hit an exact skew tie; pass an explicit "
        "override (experiment.disadvantaged_override)");
  return mean_dis < mean_adv ? GroupLabel::Disadvantaged : GroupLabel::Advantaged;
}

}  // namespace fairrank
