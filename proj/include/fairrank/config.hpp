#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/csv.hpp"
#include "fairrank/ingest.hpp"
#include "fairrank/listwise.hpp"
#include "fairrank/noise.hpp"

namespace fairrank {

struct SyntheticSpec {
  std::size_t n = 1000;
  double adv_fraction = 0.78;
  double bias_strength = 1.0;
  std::uint64_t seed = 1;
};

// Everything one experiment run needs; parse_config/serialize_config keep it
// round-trippable so a persisted config reproduces identical outputs.
struct ExperimentConfig {
  std::string dataset_name = "dataset";
  std::optional<std::filesystem::path> csv_path;
  std::optional<DatasetSchema> schema;
  std::optional<SyntheticSpec> synthetic;

  double split_fraction = 0.8;
  std::uint64_t split_seed = 1;

  TrainConfig training;                 // include_attribute is managed per model
  std::optional<double> gamma;          // nullopt = auto (L0/U0 with doubling)
  double fair_u_threshold = 0.05;       // relative to U0

  std::vector<Direction> directions = {Direction::Bidirectional,
                                       Direction::DisToAdv,
                                       Direction::AdvToDis};
  std::vector<std::size_t> ndcg_cutoffs = {10, 50, 100};
  std::vector<std::filesystem::path> fixture_paths;
  std::optional<GroupLabel> disadvantaged_override;

  std::uint64_t experiment_seed = 42;
  std::filesystem::path output_dir = "out";
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = item.find_last_not_of(" \t");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace detail

// Config grammar: one `key = value` per line, `#` starts a comment, lists
// are comma separated. Unknown keys are an error so typos surface early.
inline ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      if (x == std::string::npos) return std::string();
      const auto y = s.find_last_not_of(" \t\r");
      return s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw std::runtime_error("config key '" + key + "' appears twice");
  }

  ExperimentConfig cfg;
  DatasetSchema schema;
  bool have_schema = false;
  SyntheticSpec synth;
  bool have_synth = false;

  for (const auto& [key, value] : kv) {
    if (key == "dataset.name") cfg.dataset_name = value;
    else if (key == "dataset.csv") { cfg.csv_path = value; }
    else if (key == "dataset.id_column") { schema.id_column = value; have_schema = true; }
    else if (key == "dataset.judgment_column") { schema.judgment_column = value; have_schema = true; }
    else if (key == "dataset.group_column") { schema.group_column = value; have_schema = true; }
    else if (key == "dataset.disadvantaged_value") { schema.disadvantaged_value = value; have_schema = true; }
    else if (key == "dataset.feature_columns") { schema.feature_columns = detail::split_list(value); have_schema = true; }
    else if (key == "dataset.name_column") { schema.name_column = value; have_schema = true; }
    else if (key == "synthetic.n") { synth.n = static_cast<std::size_t>(parse_int64(value, key)); have_synth = true; }
    else if (key == "synthetic.adv_fraction") { synth.adv_fraction = parse_double(value, key); have_synth = true; }
    else if (key == "synthetic.bias_strength") { synth.bias_strength = parse_double(value, key); have_synth = true; }
    else if (key == "synthetic.seed") { synth.seed = static_cast<std::uint64_t>(parse_int64(value, key)); have_synth = true; }
    else if (key == "split.fraction") cfg.split_fraction = parse_double(value, key);
    else if (key == "split.seed") cfg.split_seed = static_cast<std::uint64_t>(parse_int64(value, key));
    else if (key == "training.learning_rate") cfg.training.learning_rate = parse_double(value, key);
    else if (key == "training.epochs") cfg.training.epochs = static_cast<int>(parse_int64(value, key));
    else if (key == "training.seed") cfg.training.seed = static_cast<std::uint64_t>(parse_int64(value, key));
    else if (key == "training.gamma") {
      if (value != "auto") cfg.gamma = parse_double(value, key);
    }
    else if (key == "training.u_threshold") cfg.fair_u_threshold = parse_double(value, key);
    else if (key == "noise.directions") {
      cfg.directions.clear();
      for (const auto& d : detail::split_list(value))
        cfg.directions.push_back(direction_from_string(d));
    }
    else if (key == "metrics.ndcg_cutoffs") {
      cfg.ndcg_cutoffs.clear();
      for (const auto& c : detail::split_list(value))
        cfg.ndcg_cutoffs.push_back(static_cast<std::size_t>(parse_int64(c, key)));
    }
    else if (key == "fixtures.paths") {
      for (const auto& p : detail::split_list(value)) cfg.fixture_paths.emplace_back(p);
    }
    else if (key == "experiment.seed") cfg.experiment_seed = static_cast<std::uint64_t>(parse_int64(value, key));
    else if (key == "experiment.disadvantaged_override") cfg.disadvantaged_override = group_from_string(value);
    else if (key == "output.dir") cfg.output_dir = value;
    else throw std::runtime_error("unknown config key '" + key + "'");
  }

  if (have_schema) cfg.schema = schema;
  if (have_synth) cfg.synthetic = synth;
  if (cfg.csv_path && !cfg.schema)
    throw std::runtime_error("dataset.csv given without its schema keys");
  if (!cfg.csv_path && !cfg.synthetic)
    throw std::runtime_error("config needs either dataset.csv + schema or synthetic.* keys");
  if (cfg.csv_path && cfg.synthetic)
    throw std::runtime_error("config has both dataset.csv and synthetic.*; pick one");
  if (cfg.schema) cfg.schema->validate();
  return cfg;
}

inline ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  auto emit = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  emit("dataset.name", cfg.dataset_name);
  if (cfg.csv_path) {
    emit("dataset.csv", cfg.csv_path->string());
    emit("dataset.id_column", cfg.schema->id_column);
    emit("dataset.judgment_column", cfg.schema->judgment_column);
    emit("dataset.group_column", cfg.schema->group_column);
    emit("dataset.disadvantaged_value", cfg.schema->disadvantaged_value);
    std::string features;
    for (const auto& f : cfg.schema->feature_columns)
      features += (features.empty() ? "" : ",") + f;
    emit("dataset.feature_columns", features);
    if (cfg.schema->name_column) emit("dataset.name_column", *cfg.schema->name_column);
  }
  if (cfg.synthetic) {
    emit("synthetic.n", std::to_string(cfg.synthetic->n));
    emit("synthetic.adv_fraction", format_double(cfg.synthetic->adv_fraction));
    emit("synthetic.bias_strength", format_double(cfg.synthetic->bias_strength));
    emit("synthetic.seed", std::to_string(cfg.synthetic->seed));
  }
  emit("split.fraction", format_double(cfg.split_fraction));
  emit("split.seed", std::to_string(cfg.split_seed));
  emit("training.learning_rate", format_double(cfg.training.learning_rate));
  emit("training.epochs", std::to_string(cfg.training.epochs));
  emit("training.seed", std::to_string(cfg.training.seed));
  emit("training.gamma", cfg.gamma ? format_double(*cfg.gamma) : std::string("auto"));
  emit("training.u_threshold", format_double(cfg.fair_u_threshold));
  {
    std::string dirs;
    for (Direction d : cfg.directions)
      dirs += (dirs.empty() ? "" : ",") + std::string(to_string(d));
    emit("noise.directions", dirs);
  }
  {
    std::string cuts;
    for (std::size_t c : cfg.ndcg_cutoffs)
      cuts += (cuts.empty() ? "" : ",") + std::to_string(c);
    emit("metrics.ndcg_cutoffs", cuts);
  }
  if (!cfg.fixture_paths.empty()) {
    std::string paths;
    for (const auto& p : cfg.fixture_paths)
      paths += (paths.empty() ? "" : ",") + p.string();
    emit("fixtures.paths", paths);
  }
  emit("experiment.seed", std::to_string(cfg.experiment_seed));
  if (cfg.disadvantaged_override)
    emit("experiment.disadvantaged_override", to_string(*cfg.disadvantaged_override));
  emit("output.dir", cfg.output_dir.string());
  return out;
}

}  // namespace fairrank
