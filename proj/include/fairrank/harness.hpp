#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairrank/config.hpp"
#include "fairrank/csv.hpp"
#include "fairrank/detconstsort.hpp"
#include "fairrank/fairltr.hpp"
#include "fairrank/ingest.hpp"
#include "fairrank/listwise.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/noise.hpp"
#include "fairrank/pipeline.hpp"
#include "fairrank/rng.hpp"
#include "fairrank/svg.hpp"

namespace fairrank {

// Desk-scale stand-in for the real datasets. The disadvantaged group gets a
// small positive shift on the skill feature but a larger direct penalty on
// the judgment, modeling settings where the outcome variable under-values
// the group relative to its observable qualifications:
//   skill  ~ N(0,1) + 0.55 * bias * [dis]
//   aux    ~ N(0,1)
//   spare  ~ N(0,1)                      (carries no signal)
//   judgment = skill + 0.5 * aux - bias * [dis] + 0.1 * N(0,1)
// detect_disadvantaged_group recovers the disadvantaged group for
// bias_strength >= 0.5 at n >= 200.
inline Dataset generate_synthetic(std::size_t n, double adv_fraction,
                                  double bias_strength, std::uint64_t seed) {
  if (n < 10) throw std::invalid_argument("generate_synthetic: n must be >= 10");
  if (!(adv_fraction > 0.0 && adv_fraction < 1.0))
    throw std::invalid_argument("generate_synthetic: adv_fraction must be in (0, 1)");
  if (!(bias_strength >= 0.0) || !std::isfinite(bias_strength))
    throw std::invalid_argument("generate_synthetic: bias_strength must be finite and >= 0");

  std::size_t n_adv = round_count(adv_fraction * static_cast<double>(n));
  n_adv = std::max<std::size_t>(1, std::min(n_adv, n - 1));

  std::vector<GroupLabel> labels(n, GroupLabel::Disadvantaged);
  for (std::size_t i = 0; i < n_adv; ++i) labels[i] = GroupLabel::Advantaged;
  SplitMix64 label_rng(derive_seed(seed, {0}));
  label_rng.shuffle(labels);

  SplitMix64 rng(derive_seed(seed, {1}));
  std::vector<Candidate> candidates;
  std::vector<std::string> names;
  candidates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool dis = labels[i] == GroupLabel::Disadvantaged;
    Candidate c;
    c.id = static_cast<std::int64_t>(i + 1);
    const double skill = rng.normal() + (dis ? 0.55 * bias_strength : 0.0);
    const double aux = rng.normal();
    const double spare = rng.normal();
    c.features = {skill, aux, spare};
    c.judgment = skill + 0.5 * aux - (dis ? bias_strength : 0.0) + 0.1 * rng.normal();
    c.true_group = labels[i];
    c.observed_group = labels[i];
    candidates.push_back(std::move(c));
    names.push_back("cand_" + std::to_string(i + 1));
  }
  return Dataset::make(std::move(candidates), {"skill", "aux", "spare"}, std::move(names));
}

// One metric bundle keyed by the requested (un-clamped) cutoffs.
struct MetricsValues {
  double exposure_ratio = 0.0;
  double ndkl = 0.0;
  std::map<std::size_t, double> ndcg;
  std::map<std::size_t, double> skew_dis;
  std::map<std::size_t, double> skew_adv;
  double exp_dis = 0.0;
  double exp_adv = 0.0;
};

inline MetricsValues values_from_report(const MetricReport& report,
                                        const std::vector<std::size_t>& cutoffs,
                                        std::size_t n) {
  MetricsValues v;
  v.exposure_ratio = report.dadv_adv_ratio;
  v.ndkl = report.ndkl;
  v.exp_dis = report.avg_exposure.at(GroupLabel::Disadvantaged);
  v.exp_adv = report.avg_exposure.at(GroupLabel::Advantaged);
  for (std::size_t k : cutoffs) {
    const std::size_t kk = std::min(k, n);
    v.ndcg[k] = report.ndcg_at.at(kk);
    v.skew_dis[k] = report.skew_at.at(kk).at(GroupLabel::Disadvantaged);
    v.skew_adv[k] = report.skew_at.at(kk).at(GroupLabel::Advantaged);
  }
  return v;
}

// One line of the results CSV. `kind` is scenario, mean or fixture; the seed
// column carries the replicate seed, or the service name in fixture mode.
struct ResultRow {
  std::string dataset;
  std::string strategy;
  std::string direction;
  double epsilon = 0.0;
  std::string seed_or_service;
  std::string kind;
  MetricsValues values;
  std::optional<MetricsValues> sd;  // mean rows only
};

inline std::vector<std::string> result_header(const std::vector<std::size_t>& cutoffs) {
  std::vector<std::string> h = {"dataset", "strategy", "direction",
                                "epsilon", "seed",     "kind",
                                "exposure_ratio", "ndkl"};
  for (std::size_t k : cutoffs) h.push_back("ndcg_at_" + std::to_string(k));
  for (std::size_t k : cutoffs) {
    h.push_back("skew_dis_at_" + std::to_string(k));
    h.push_back("skew_adv_at_" + std::to_string(k));
  }
  h.push_back("avg_exposure_dis");
  h.push_back("avg_exposure_adv");
  h.push_back("exposure_ratio_sd");
  h.push_back("ndkl_sd");
  for (std::size_t k : cutoffs) h.push_back("ndcg_at_" + std::to_string(k) + "_sd");
  return h;
}

inline std::vector<std::string> result_record(const ResultRow& row,
                                              const std::vector<std::size_t>& cutoffs) {
  std::vector<std::string> r = {row.dataset,
                                row.strategy,
                                row.direction,
                                format_double(row.epsilon),
                                row.seed_or_service,
                                row.kind,
                                format_double(row.values.exposure_ratio),
                                format_double(row.values.ndkl)};
  for (std::size_t k : cutoffs) r.push_back(format_double(row.values.ndcg.at(k)));
  for (std::size_t k : cutoffs) {
    r.push_back(format_double(row.values.skew_dis.at(k)));
    r.push_back(format_double(row.values.skew_adv.at(k)));
  }
  r.push_back(format_double(row.values.exp_dis));
  r.push_back(format_double(row.values.exp_adv));
  if (row.sd) {
    r.push_back(format_double(row.sd->exposure_ratio));
    r.push_back(format_double(row.sd->ndkl));
    for (std::size_t k : cutoffs) r.push_back(format_double(row.sd->ndcg.at(k)));
  } else {
    r.push_back("");
    r.push_back("");
    for (std::size_t k : cutoffs) {
      (void)k;
      r.push_back("");
    }
  }
  return r;
}

// Dataset, split, normalization and the three trained models of one
// experiment, before any scenarios run.
struct PreparedExperiment {
  Dataset full;
  Dataset train_raw;
  Dataset test_raw;
  NormalizationStats stats;
  bool labels_swapped = false;  // detection disagreed with the loaded mapping
  ModelSet models;
  double gamma_used = 0.0;
  std::vector<std::string> gamma_trace;
};

namespace detail {

inline Dataset swap_group_labels(const Dataset& data) {
  std::vector<Candidate> cands = data.candidates;
  for (auto& c : cands) {
    c.true_group = other_group(c.true_group);
    if (c.observed_group) c.observed_group = other_group(*c.observed_group);
  }
  return Dataset::make(std::move(cands), data.feature_names, data.names);
}

}  // namespace detail

inline PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
  PreparedExperiment prep;
  if (cfg.synthetic) {
    prep.full = generate_synthetic(cfg.synthetic->n, cfg.synthetic->adv_fraction,
                                   cfg.synthetic->bias_strength, cfg.synthetic->seed);
  } else {
    prep.full = load_dataset(*cfg.csv_path, *cfg.schema);
  }

  const GroupLabel detected = cfg.disadvantaged_override
                                  ? *cfg.disadvantaged_override
                                  : detect_disadvantaged_group(prep.full);
  if (detected == GroupLabel::Advantaged) {
    prep.full = detail::swap_group_labels(prep.full);
    prep.labels_swapped = true;
  }

  auto [train_raw, test_raw] = split_train_test(prep.full, cfg.split_fraction, cfg.split_seed);
  prep.train_raw = std::move(train_raw);
  prep.test_raw = std::move(test_raw);
  prep.stats = fit_normalization(prep.train_raw);
  const Dataset train_norm = apply_normalization(prep.train_raw, prep.stats);

  TrainConfig base = cfg.training;
  base.include_attribute = false;
  prep.models.oblivious = train(train_norm, base);
  base.include_attribute = true;
  prep.models.with_attribute = train(train_norm, base);

  if (cfg.gamma) {
    prep.gamma_used = *cfg.gamma;
    prep.models.fair = train_fair(train_norm, {*cfg.gamma, base});
    prep.gamma_trace = {"gamma fixed by config: " + format_double(*cfg.gamma)};
    prep.models.fair.training_notes = prep.gamma_trace;
  } else {
    AutoFairResult auto_fair = train_fair_auto(train_norm, base, cfg.fair_u_threshold);
    prep.models.fair = std::move(auto_fair.model);
    prep.gamma_used = prep.models.fair.gamma;
    prep.gamma_trace = prep.models.fair.training_notes;
  }

  prep.models.oblivious.norm = prep.stats;
  prep.models.with_attribute.norm = prep.stats;
  prep.models.fair.norm = prep.stats;
  return prep;
}

struct ExperimentResult {
  std::filesystem::path output_dir;
  std::filesystem::path results_csv;
  std::filesystem::path metadata_json;
  std::vector<std::filesystem::path> charts;
  std::size_t scenario_rows = 0;
  std::size_t mean_rows = 0;
  std::size_t fixture_rows = 0;
};

namespace detail {

inline std::size_t strategy_order(const std::string& name) {
  const auto& all = all_strategies();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i].name() == name) return i;
  return all.size();
}

inline void sort_rows(std::vector<ResultRow>& rows) {
  auto kind_rank = [](const std::string& kind) {
    if (kind == "scenario") return 0;
    if (kind == "mean") return 1;
    return 2;  // fixture
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ResultRow& a, const ResultRow& b) {
    if (a.dataset != b.dataset) return a.dataset < b.dataset;
    if (a.direction != b.direction) return a.direction < b.direction;
    const auto sa = strategy_order(a.strategy), sb = strategy_order(b.strategy);
    if (sa != sb) return sa < sb;
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    const auto ka = kind_rank(a.kind), kb = kind_rank(b.kind);
    if (ka != kb) return ka < kb;
    return a.seed_or_service < b.seed_or_service;
  });
}

inline std::vector<ResultRow> aggregate_means(const std::vector<ResultRow>& scenario_rows,
                                              const std::vector<std::size_t>& cutoffs) {
  struct Key {
    std::string dataset, strategy, direction;
    double epsilon;
    bool operator<(const Key& o) const {
      if (dataset != o.dataset) return dataset < o.dataset;
      if (strategy != o.strategy) return strategy < o.strategy;
      if (direction != o.direction) return direction < o.direction;
      return epsilon < o.epsilon;
    }
  };
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& row : scenario_rows)
    groups[{row.dataset, row.strategy, row.direction, row.epsilon}].push_back(&row);

  std::vector<ResultRow> means;
  for (const auto& [key, members] : groups) {
    const double m = static_cast<double>(members.size());
    MetricsValues mean, sd;
    for (std::size_t k : cutoffs) {
      mean.ndcg[k] = mean.skew_dis[k] = mean.skew_adv[k] = 0.0;
      sd.ndcg[k] = sd.skew_dis[k] = sd.skew_adv[k] = 0.0;
    }
    for (const ResultRow* r : members) {
      mean.exposure_ratio += r->values.exposure_ratio;
      mean.ndkl += r->values.ndkl;
      mean.exp_dis += r->values.exp_dis;
      mean.exp_adv += r->values.exp_adv;
      for (std::size_t k : cutoffs) {
        mean.ndcg[k] += r->values.ndcg.at(k);
        mean.skew_dis[k] += r->values.skew_dis.at(k);
        mean.skew_adv[k] += r->values.skew_adv.at(k);
      }
    }
    mean.exposure_ratio /= m;
    mean.ndkl /= m;
    mean.exp_dis /= m;
    mean.exp_adv /= m;
    for (std::size_t k : cutoffs) {
      mean.ndcg[k] /= m;
      mean.skew_dis[k] /= m;
      mean.skew_adv[k] /= m;
    }
    for (const ResultRow* r : members) {
      const double dr = r->values.exposure_ratio - mean.exposure_ratio;
      sd.exposure_ratio += dr * dr;
      const double dn = r->values.ndkl - mean.ndkl;
      sd.ndkl += dn * dn;
      for (std::size_t k : cutoffs) {
        const double dg = r->values.ndcg.at(k) - mean.ndcg.at(k);
        sd.ndcg[k] += dg * dg;
      }
    }
    sd.exposure_ratio = std::sqrt(sd.exposure_ratio / m);
    sd.ndkl = std::sqrt(sd.ndkl / m);
    for (std::size_t k : cutoffs) sd.ndcg[k] = std::sqrt(sd.ndcg.at(k) / m);

    ResultRow row;
    row.dataset = key.dataset;
    row.strategy = key.strategy;
    row.direction = key.direction;
    row.epsilon = key.epsilon;
    row.seed_or_service = "";
    row.kind = "mean";
    row.values = mean;
    row.sd = sd;
    means.push_back(std::move(row));
  }
  return means;
}

inline void write_rows(const std::filesystem::path& path,
                       const std::vector<ResultRow>& rows,
                       const std::vector<std::size_t>& cutoffs,
                       const std::string& failure_marker = "") {
  std::vector<std::vector<std::string>> records;
  records.reserve(rows.size());
  for (const auto& row : rows) records.push_back(result_record(row, cutoffs));
  write_csv(path, result_header(cutoffs), records);
  if (!failure_marker.empty()) {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    out << "# FAILED " << failure_marker << "\n";
  }
}

inline std::vector<std::filesystem::path> write_charts(
    const std::filesystem::path& chart_dir, const std::string& dataset,
    const std::vector<ResultRow>& rows, const std::vector<std::size_t>& cutoffs) {
  std::filesystem::create_directories(chart_dir);
  std::vector<std::filesystem::path> written;
  const std::size_t ndcg_k = cutoffs.empty() ? 100 : cutoffs.back();

  std::vector<std::string> directions;
  for (const auto& row : rows)
    if (row.kind == "mean" &&
        std::find(directions.begin(), directions.end(), row.direction) == directions.end())
      directions.push_back(row.direction);

  struct MetricDef {
    std::string key, label;
    std::optional<double> ideal;
  };
  const std::vector<MetricDef> metrics = {
      {"exposure_ratio", "DAdv/Adv exposure ratio", 1.0},
      {"ndkl", "NDKL", 0.0},
      {"ndcg", "NDCG@" + std::to_string(ndcg_k), 1.0},
  };

  for (const auto& direction : directions) {
    for (const auto& metric : metrics) {
      ChartSpec spec;
      spec.title = dataset + " / " + direction + " / " + metric.label;
      spec.x_label = "error level";
      spec.y_label = metric.label;
      spec.ideal_y = metric.ideal;
      for (const auto& strategy : all_strategies()) {
        ChartSeries series;
        series.label = strategy.name();
        for (const auto& row : rows) {
          if (row.kind != "mean" || row.direction != direction ||
              row.strategy != strategy.name())
            continue;
          double y = 0.0;
          if (metric.key == "exposure_ratio") y = row.values.exposure_ratio;
          else if (metric.key == "ndkl") y = row.values.ndkl;
          else y = row.values.ndcg.at(ndcg_k);
          series.points.push_back({row.epsilon, y});
        }
        std::sort(series.points.begin(), series.points.end());
        if (!series.points.empty()) spec.series.push_back(std::move(series));
      }
      if (spec.series.empty()) continue;
      const auto path = chart_dir / (direction + "_" + metric.key + ".svg");
      std::ofstream out(path, std::ios::binary);
      out << render_line_chart(spec);
      written.push_back(path);
    }
  }

  // fixture rows: categorical x-axis, services in increasing error order
  std::vector<std::pair<double, std::string>> services;
  for (const auto& row : rows) {
    if (row.kind != "fixture") continue;
    std::pair<double, std::string> entry{row.epsilon, row.seed_or_service};
    if (std::find(services.begin(), services.end(), entry) == services.end())
      services.push_back(entry);
  }
  if (!services.empty()) {
    std::sort(services.begin(), services.end(), [](const auto& a, const auto& b) {
      const bool a_truth = a.second == "G-TRUTH";  // ground truth leads
      const bool b_truth = b.second == "G-TRUTH";
      if (a_truth != b_truth) return a_truth;
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    for (const auto& metric : metrics) {
      ChartSpec spec;
      spec.title = dataset + " / inference services / " + metric.label;
      spec.x_label = "service (increasing error rate)";
      spec.y_label = metric.label;
      spec.ideal_y = metric.ideal;
      for (const auto& [err, service] : services) spec.x_tick_labels.push_back(service);
      for (const auto& strategy : all_strategies()) {
        ChartSeries series;
        series.label = strategy.name();
        for (std::size_t i = 0; i < services.size(); ++i) {
          for (const auto& row : rows) {
            if (row.kind != "fixture" || row.strategy != strategy.name() ||
                row.seed_or_service != services[i].second)
              continue;
            double y = 0.0;
            if (metric.key == "exposure_ratio") y = row.values.exposure_ratio;
            else if (metric.key == "ndkl") y = row.values.ndkl;
            else y = row.values.ndcg.at(ndcg_k);
            series.points.push_back({static_cast<double>(i), y});
          }
        }
        if (!series.points.empty()) spec.series.push_back(std::move(series));
      }
      if (spec.series.empty()) continue;
      const auto path = chart_dir / ("fixtures_" + metric.key + ".svg");
      std::ofstream out(path, std::ios::binary);
      out << render_line_chart(spec);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace detail

// The full benchmark: detect the disadvantaged group, train the three
// models, run the seven strategies across every noise scenario (and fixture
// when configured), then write results.csv, metadata.json and the trend
// charts. Identical config and seeds give byte-identical outputs.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto results_path = cfg.output_dir / "results.csv";

  PreparedExperiment prep = prepare_experiment(cfg);

  const std::filesystem::path model_dir = cfg.output_dir / "models";
  std::filesystem::create_directories(model_dir);
  save_model(prep.models.oblivious, model_dir / "oblivious.json");
  save_model(prep.models.with_attribute, model_dir / "ltr.json");
  save_model(prep.models.fair, model_dir / "fair.json");

  std::vector<ResultRow> rows;
  std::size_t scenario_count = 0;
  std::vector<FixtureReport> fixture_reports;

  try {
    for (Direction direction : cfg.directions) {
      for (const NoiseScenario& scenario : scenario_grid(direction, cfg.experiment_seed)) {
        const Dataset perturbed = perturb(prep.test_raw, scenario);
        for (const StrategySpec& strategy : all_strategies()) {
          ResultRow row;
          row.dataset = cfg.dataset_name;
          row.strategy = strategy.name();
          row.direction = to_string(direction);
          row.epsilon = scenario.epsilon;
          row.seed_or_service = std::to_string(scenario.seed);
          row.kind = "scenario";
          try {
            const auto output = run_strategy_detailed(strategy, prep.models, perturbed);
            const auto report = compute_report(output.final(), perturbed, cfg.ndcg_cutoffs);
            row.values = values_from_report(report, cfg.ndcg_cutoffs, perturbed.size());
          } catch (const std::exception& e) {
            throw std::runtime_error("strategy " + strategy.name() + " at direction=" +
                                     to_string(direction) + " epsilon=" +
                                     format_double(scenario.epsilon) + " seed=" +
                                     std::to_string(scenario.seed) + ": " + e.what());
          }
          rows.push_back(std::move(row));
          ++scenario_count;
        }
      }
    }

    if (!cfg.fixture_paths.empty()) {
      // G-TRUTH leads: the unperturbed test set is the zero-error reference.
      auto run_fixture_case = [&](const std::string& service, double error_rate,
                                  const Dataset& resolved) {
        for (const StrategySpec& strategy : all_strategies()) {
          ResultRow row;
          row.dataset = cfg.dataset_name;
          row.strategy = strategy.name();
          row.direction = "fixtures";
          row.epsilon = error_rate;
          row.seed_or_service = service;
          row.kind = "fixture";
          const auto output = run_strategy_detailed(strategy, prep.models, resolved);
          const auto report = compute_report(output.final(), resolved, cfg.ndcg_cutoffs);
          row.values = values_from_report(report, cfg.ndcg_cutoffs, resolved.size());
          rows.push_back(std::move(row));
        }
      };
      run_fixture_case("G-TRUTH", 0.0, prep.test_raw);
      for (const auto& path : cfg.fixture_paths) {
        for (const auto& fixture : load_fixtures(path)) {
          auto [resolved, report] = apply_fixture(prep.test_raw, fixture);
          fixture_reports.push_back(report);
          run_fixture_case(report.service, report.effective_error_rate, resolved);
        }
      }
    }
  } catch (const std::exception& e) {
    detail::sort_rows(rows);
    detail::write_rows(results_path, rows, cfg.ndcg_cutoffs, e.what());
    throw;
  }

  std::vector<ResultRow> scenario_rows;
  for (const auto& row : rows)
    if (row.kind == "scenario") scenario_rows.push_back(row);
  auto means = detail::aggregate_means(scenario_rows, cfg.ndcg_cutoffs);
  for (auto& m : means) rows.push_back(std::move(m));
  detail::sort_rows(rows);
  detail::write_rows(results_path, rows, cfg.ndcg_cutoffs);

  ExperimentResult result;
  result.output_dir = cfg.output_dir;
  result.results_csv = results_path;
  result.scenario_rows = scenario_count;
  result.fixture_rows = 0;
  for (const auto& row : rows) {
    if (row.kind == "mean") ++result.mean_rows;
    if (row.kind == "fixture") ++result.fixture_rows;
  }

  result.charts = detail::write_charts(cfg.output_dir / "charts", cfg.dataset_name,
                                       rows, cfg.ndcg_cutoffs);

  // metadata: everything needed to audit or re-run the experiment
  nlohmann::json meta;
  meta["dataset"] = {{"name", cfg.dataset_name},
                     {"n", prep.full.size()},
                     {"train_size", prep.train_raw.size()},
                     {"test_size", prep.test_raw.size()},
                     {"labels_swapped_after_detection", prep.labels_swapped},
                     {"proportions",
                      {{"dis", prep.full.proportions.at(GroupLabel::Disadvantaged)},
                       {"adv", prep.full.proportions.at(GroupLabel::Advantaged)}}}};
  meta["normalization"] = to_json(prep.stats);
  auto model_meta = [](const LinearRanker& model) {
    nlohmann::json j;
    j["feature_names"] = model.feature_names;
    j["weights"] = model.weights;
    j["gamma"] = model.gamma;
    j["final_loss"] = model.loss_trace.empty() ? 0.0 : model.loss_trace.back();
    return j;
  };
  meta["models"] = {{"oblivious", model_meta(prep.models.oblivious)},
                    {"ltr", model_meta(prep.models.with_attribute)},
                    {"fair", model_meta(prep.models.fair)}};
  meta["gamma"] = {{"value", prep.gamma_used}, {"trace", prep.gamma_trace}};
  nlohmann::json seeds = nlohmann::json::object();
  for (Direction d : cfg.directions) {
    nlohmann::json reps = nlohmann::json::array();
    for (std::uint64_t r = 0; r < 5; ++r)
      reps.push_back(derive_seed(cfg.experiment_seed, {direction_index(d), r}));
    seeds[to_string(d)] = reps;
  }
  meta["scenario_replicate_seeds"] = seeds;
  if (!fixture_reports.empty()) {
    nlohmann::json fr = nlohmann::json::array();
    for (const auto& report : fixture_reports)
      fr.push_back({{"service", report.service},
                    {"n", report.n},
                    {"resolved", report.resolved},
                    {"correct", report.correct},
                    {"incorrect", report.incorrect},
                    {"unknown_total", report.unknown_total},
                    {"unknown_dis", report.unknown_dis},
                    {"unknown_adv", report.unknown_adv},
                    {"effective_error_rate", report.effective_error_rate}});
    meta["fixture_reports"] = fr;
  }
  meta["rows"] = {{"scenario", result.scenario_rows},
                  {"mean", result.mean_rows},
                  {"fixture", result.fixture_rows}};
  meta["config"] = serialize_config(cfg);

  result.metadata_json = cfg.output_dir / "metadata.json";
  {
    std::ofstream out(result.metadata_json, std::ios::binary);
    out << meta.dump(2) << "\n";
  }
  {
    std::ofstream out(cfg.output_dir / "config_used.cfg", std::ios::binary);
    out << serialize_config(cfg);
  }
  return result;
}

// Re-render charts from an existing results CSV (the `report` subcommand).
inline std::vector<std::filesystem::path> render_charts_from_csv(
    const std::filesystem::path& results_csv, const std::filesystem::path& out_dir) {
  const CsvTable table = read_csv(results_csv);
  const std::size_t dataset_ix = table.column("dataset");
  const std::size_t strategy_ix = table.column("strategy");
  const std::size_t direction_ix = table.column("direction");
  const std::size_t epsilon_ix = table.column("epsilon");
  const std::size_t seed_ix = table.column("seed");
  const std::size_t kind_ix = table.column("kind");
  const std::size_t ratio_ix = table.column("exposure_ratio");
  const std::size_t ndkl_ix = table.column("ndkl");

  std::vector<std::size_t> cutoffs;
  for (const auto& col : table.header) {
    const std::string prefix = "ndcg_at_";
    if (col.rfind(prefix, 0) == 0 && col.find("_sd") == std::string::npos)
      cutoffs.push_back(static_cast<std::size_t>(
          parse_int64(col.substr(prefix.size()), "results header")));
  }
  if (cutoffs.empty()) throw std::runtime_error("results CSV has no ndcg_at_* columns");

  std::vector<ResultRow> rows;
  std::string dataset = "results";
  for (const auto& rec : table.rows) {
    const std::string& kind = rec[kind_ix];
    if (kind != "mean" && kind != "fixture") continue;
    ResultRow row;
    row.dataset = rec[dataset_ix];
    dataset = row.dataset;
    row.strategy = rec[strategy_ix];
    row.direction = rec[direction_ix];
    row.epsilon = parse_double(rec[epsilon_ix], "epsilon");
    row.seed_or_service = rec[seed_ix];
    row.kind = kind;
    row.values.exposure_ratio = parse_double(rec[ratio_ix], "exposure_ratio");
    row.values.ndkl = parse_double(rec[ndkl_ix], "ndkl");
    for (std::size_t k : cutoffs) {
      const auto col = table.column("ndcg_at_" + std::to_string(k));
      row.values.ndcg[k] = parse_double(rec[col], "ndcg");
      row.values.skew_dis[k] = 0.0;
      row.values.skew_adv[k] = 0.0;
    }
    rows.push_back(std::move(row));
  }
  return detail::write_charts(out_dir, dataset, rows, cutoffs);
}

}  // namespace fairrank
