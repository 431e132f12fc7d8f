#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "fairrank/harness.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fairrank;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("fairrank_harness_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.dataset_name = "unit";
  cfg.synthetic = SyntheticSpec{160, 0.7, 1.0, 5};
  cfg.training.epochs = 40;
  cfg.directions = {Direction::Bidirectional};
  cfg.output_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("synthetic proportions follow the requested fraction") {
  const Dataset data = generate_synthetic(992, 0.78, 1.0, 9);
  std::size_t adv = 0;
  for (const auto& c : data.candidates)
    if (c.true_group == GroupLabel::Advantaged) ++adv;
  REQUIRE(adv == round_count(0.78 * 992));
  REQUIRE(data.proportions.at(GroupLabel::Advantaged) ==
          Catch::Approx(0.78).margin(0.001));
}

TEST_CASE("unbiased synthetic data has near-parity exposure") {
  const Dataset data = generate_synthetic(4000, 0.7, 0.0, 13);
  std::vector<RankedItem> by_judgment;
  for (const auto& c : data.candidates) by_judgment.push_back({c.id, c.judgment});
  const Ranking r = rank_by_score(by_judgment);
  const double ratio = exposure_ratio(true_groups_in_rank_order(r, data));
  REQUIRE(std::abs(ratio - 1.0) < 0.12);
}

TEST_CASE("strong bias pushes the disadvantaged group out of the whole top half") {
  const Dataset data = generate_synthetic(1000, 0.7, 3.0, 17);
  std::vector<RankedItem> by_judgment;
  for (const auto& c : data.candidates) by_judgment.push_back({c.id, c.judgment});
  const Ranking r = rank_by_score(by_judgment);
  const auto groups = true_groups_in_rank_order(r, data);
  for (std::size_t k = 25; k <= groups.size() / 2; ++k)
    REQUIRE(skew(groups, GroupLabel::Disadvantaged, k) < 1.0);
}

TEST_CASE("detection recovers the generated disadvantaged group") {
  const Dataset data = generate_synthetic(1000, 0.78, 1.0, 19);
  REQUIRE(detect_disadvantaged_group(data) == GroupLabel::Disadvantaged);
}

TEST_CASE("generator rejects degenerate parameters") {
  REQUIRE_THROWS(generate_synthetic(5, 0.5, 1.0, 1));
  REQUIRE_THROWS(generate_synthetic(100, 0.0, 1.0, 1));
  REQUIRE_THROWS(generate_synthetic(100, 1.0, 1.0, 1));
  REQUIRE_THROWS(generate_synthetic(100, 0.5, -1.0, 1));
}

TEST_CASE("run_experiment produces the full scenario row grid") {
  TempDir dir;
  auto cfg = small_config(dir.path);
  cfg.directions = {Direction::Bidirectional, Direction::DisToAdv, Direction::AdvToDis};
  const auto result = run_experiment(cfg);
  REQUIRE(result.scenario_rows == 7 * 47 * 3);
  REQUIRE(result.mean_rows == 7 * 11 * 3);
  REQUIRE(fs::exists(result.results_csv));
  REQUIRE(fs::exists(result.metadata_json));
  REQUIRE(fs::exists(dir.path / "models" / "oblivious.json"));
  REQUIRE(fs::exists(dir.path / "models" / "ltr.json"));
  REQUIRE(fs::exists(dir.path / "models" / "fair.json"));
  REQUIRE(result.charts.size() == 9);

  const auto meta = nlohmann::json::parse(slurp(result.metadata_json));
  REQUIRE(meta.at("dataset").at("n").get<std::size_t>() == 160);
  REQUIRE(meta.at("rows").at("scenario").get<std::size_t>() == 7 * 47 * 3);
  REQUIRE(meta.at("gamma").contains("value"));
}

TEST_CASE("mean rows are the arithmetic mean of their replicates") {
  TempDir dir;
  const auto cfg = small_config(dir.path);
  const auto result = run_experiment(cfg);

  const CsvTable table = read_csv(result.results_csv);
  const auto kind_ix = table.column("kind");
  const auto strategy_ix = table.column("strategy");
  const auto epsilon_ix = table.column("epsilon");
  const auto ratio_ix = table.column("exposure_ratio");

  std::map<std::pair<std::string, std::string>, std::vector<double>> replicates;
  std::map<std::pair<std::string, std::string>, double> means;
  for (const auto& row : table.rows) {
    const auto key = std::make_pair(row[strategy_ix], row[epsilon_ix]);
    if (row[kind_ix] == "scenario")
      replicates[key].push_back(parse_double(row[ratio_ix], "ratio"));
    else if (row[kind_ix] == "mean")
      means[key] = parse_double(row[ratio_ix], "ratio");
  }
  REQUIRE_FALSE(means.empty());
  for (const auto& [key, values] : replicates) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    REQUIRE(means.at(key) == Catch::Approx(mean).margin(1e-12));
  }
}

TEST_CASE("two runs of one config are byte-identical") {
  TempDir dir_a, dir_b;
  auto cfg_a = small_config(dir_a.path);
  auto cfg_b = small_config(dir_b.path);
  const auto result_a = run_experiment(cfg_a);
  const auto result_b = run_experiment(cfg_b);
  REQUIRE(slurp(result_a.results_csv) == slurp(result_b.results_csv));
}

TEST_CASE("charts carry the red ideal marker and one line per strategy") {
  TempDir dir;
  const auto cfg = small_config(dir.path);
  const auto result = run_experiment(cfg);
  REQUIRE_FALSE(result.charts.empty());
  const std::string svg = slurp(result.charts.front());
  REQUIRE(svg.find("<svg") != std::string::npos);
  REQUIRE(svg.find("#d62728") != std::string::npos);  // ideal-value box
  for (const auto& strategy : all_strategies())
    REQUIRE(svg.find(">" + strategy.name() + "<") != std::string::npos);
}

TEST_CASE("config text round-trips through parse and serialize") {
  const std::string text =
      "# demo config\n"
      "dataset.name = demo\n"
      "synthetic.n = 300\n"
      "synthetic.adv_fraction = 0.7\n"
      "synthetic.bias_strength = 1.5\n"
      "synthetic.seed = 4\n"
      "split.fraction = 0.75\n"
      "split.seed = 6\n"
      "training.learning_rate = 0.1\n"
      "training.epochs = 77\n"
      "training.gamma = auto\n"
      "noise.directions = bidirectional,adv-to-dis\n"
      "metrics.ndcg_cutoffs = 5,25\n"
      "experiment.seed = 99\n"
      "output.dir = /tmp/x\n";
  const ExperimentConfig cfg = parse_config_text(text);
  REQUIRE(cfg.dataset_name == "demo");
  REQUIRE(cfg.synthetic.has_value());
  REQUIRE(cfg.synthetic->n == 300);
  REQUIRE(cfg.split_fraction == 0.75);
  REQUIRE(cfg.training.epochs == 77);
  REQUIRE_FALSE(cfg.gamma.has_value());
  REQUIRE(cfg.directions ==
          std::vector<Direction>{Direction::Bidirectional, Direction::AdvToDis});
  REQUIRE(cfg.ndcg_cutoffs == std::vector<std::size_t>{5, 25});

  const ExperimentConfig again = parse_config_text(serialize_config(cfg));
  REQUIRE(serialize_config(again) == serialize_config(cfg));
}

TEST_CASE("unknown config keys fail fast") {
  REQUIRE_THROWS_WITH(parse_config_text("synthetic.n = 100\nsplit.fractoin = 0.8\n"),
                      Catch::Matchers::ContainsSubstring("split.fractoin"));
}

TEST_CASE("config requires a data source") {
  REQUIRE_THROWS(parse_config_text("split.fraction = 0.8\n"));
}

TEST_CASE("schema-bearing configs validate their schema") {
  const std::string text =
      "dataset.csv = data.csv\n"
      "dataset.id_column = id\n"
      "dataset.judgment_column = j\n"
      "dataset.group_column = g\n"
      "dataset.disadvantaged_value = F\n"
      "dataset.feature_columns = a,a\n";
  REQUIRE_THROWS_WITH(parse_config_text(text),
                      Catch::Matchers::ContainsSubstring("twice"));
}

TEST_CASE("fixture study rows join the results with G-TRUTH first") {
  TempDir dir;
  auto cfg = small_config(dir.path / "out");

  // build a fixture file covering the test split of the synthetic dataset
  const Dataset full = generate_synthetic(160, 0.7, 1.0, 5);
  auto [train_raw, test_raw] = split_train_test(full, cfg.split_fraction, cfg.split_seed);
  const fs::path fixture_path = dir.path / "fixtures.csv";
  {
    std::ofstream out(fixture_path);
    out << "id,name,service,inferred_label\n";
    SplitMix64 rng(7);
    for (const auto& c : test_raw.candidates) {
      const double roll = rng.uniform01();
      std::string label = c.true_group == GroupLabel::Disadvantaged ? "dis" : "adv";
      if (roll < 0.1) label = "unknown";
      else if (roll < 0.3) label = c.true_group == GroupLabel::Disadvantaged ? "adv" : "dis";
      out << c.id << ",n" << c.id << ",svc," << label << "\n";
    }
  }
  cfg.fixture_paths = {fixture_path};
  const auto result = run_experiment(cfg);
  REQUIRE(result.fixture_rows == 7 * 2);  // G-TRUTH plus one service

  const CsvTable table = read_csv(result.results_csv);
  const auto kind_ix = table.column("kind");
  const auto seed_ix = table.column("seed");
  const auto eps_ix = table.column("epsilon");
  bool seen_gtruth = false, seen_svc = false;
  for (const auto& row : table.rows) {
    if (row[kind_ix] != "fixture") continue;
    if (row[seed_ix] == "G-TRUTH") {
      seen_gtruth = true;
      REQUIRE(parse_double(row[eps_ix], "eps") == 0.0);
    }
    if (row[seed_ix] == "svc") {
      seen_svc = true;
      REQUIRE(parse_double(row[eps_ix], "eps") > 0.0);
    }
  }
  REQUIRE(seen_gtruth);
  REQUIRE(seen_svc);
  // fixture charts come out alongside the scenario charts
  bool fixture_chart = false;
  for (const auto& chart : result.charts)
    if (chart.filename().string().rfind("fixtures_", 0) == 0) fixture_chart = true;
  REQUIRE(fixture_chart);
}

TEST_CASE("three services chart in increasing error order behind G-TRUTH") {
  TempDir dir;
  auto cfg = small_config(dir.path / "out");

  const Dataset full = generate_synthetic(160, 0.7, 1.0, 5);
  auto [train_raw, test_raw] = split_train_test(full, cfg.split_fraction, cfg.split_seed);
  const fs::path fixture_path = dir.path / "fixtures.csv";
  {
    std::ofstream out(fixture_path);
    out << "id,name,service,inferred_label\n";
    // wrong-label counts pick the error ordering: tidy < medium < sloppy
    const std::vector<std::pair<std::string, std::size_t>> services = {
        {"sloppy", 12}, {"tidy", 2}, {"medium", 6}};
    for (const auto& [name, wrong] : services) {
      std::size_t flipped = 0;
      for (const auto& c : test_raw.candidates) {
        std::string label = c.true_group == GroupLabel::Disadvantaged ? "dis" : "adv";
        if (flipped < wrong) {
          label = c.true_group == GroupLabel::Disadvantaged ? "adv" : "dis";
          ++flipped;
        }
        out << c.id << ",n" << c.id << "," << name << "," << label << "\n";
      }
    }
  }
  cfg.fixture_paths = {fixture_path};
  cfg.directions.clear();  // fixture study alone
  const auto result = run_experiment(cfg);
  REQUIRE(result.fixture_rows == 7 * 4);  // G-TRUTH plus three services
  REQUIRE(result.scenario_rows == 0);

  // the categorical x-axis lists services by increasing effective error rate
  fs::path chart;
  for (const auto& c : result.charts)
    if (c.filename() == "fixtures_exposure_ratio.svg") chart = c;
  REQUIRE_FALSE(chart.empty());
  const std::string svg = slurp(chart);
  const auto pos_gtruth = svg.find(">G-TRUTH<");
  const auto pos_tidy = svg.find(">tidy<");
  const auto pos_medium = svg.find(">medium<");
  const auto pos_sloppy = svg.find(">sloppy<");
  REQUIRE(pos_gtruth != std::string::npos);
  REQUIRE(pos_gtruth < pos_tidy);
  REQUIRE(pos_tidy < pos_medium);
  REQUIRE(pos_medium < pos_sloppy);
}

TEST_CASE("labels swap when detection disagrees with the declared mapping") {
  // generate data, then flip the declared labels so detection must swap back
  const Dataset data = generate_synthetic(300, 0.7, 1.5, 23);
  std::vector<Candidate> flipped = data.candidates;
  for (auto& c : flipped) {
    c.true_group = other_group(c.true_group);
    c.observed_group = c.true_group;
  }
  TempDir dir;
  const fs::path csv = dir.path / "flipped.csv";
  {
    std::ofstream out(csv);
    out << "id,grp,a,b,c,judg\n";
    for (const auto& c : flipped) {
      out << c.id << "," << (c.true_group == GroupLabel::Disadvantaged ? "P" : "Q") << ","
          << format_double(c.features[0]) << "," << format_double(c.features[1]) << ","
          << format_double(c.features[2]) << "," << format_double(c.judgment) << "\n";
    }
  }
  ExperimentConfig cfg;
  cfg.dataset_name = "flipped";
  cfg.csv_path = csv;
  DatasetSchema schema;
  schema.id_column = "id";
  schema.judgment_column = "judg";
  schema.group_column = "grp";
  schema.disadvantaged_value = "P";  // wrong on purpose: P is the advantaged group here
  schema.feature_columns = {"a", "b", "c"};
  cfg.schema = schema;
  cfg.training.epochs = 30;
  cfg.directions = {Direction::Bidirectional};
  cfg.output_dir = dir.path / "out";
  const auto result = run_experiment(cfg);
  const auto meta = nlohmann::json::parse(slurp(result.metadata_json));
  REQUIRE(meta.at("dataset").at("labels_swapped_after_detection").get<bool>());
}

TEST_CASE("a failing scenario flushes partial results with a FAILED marker") {
  TempDir dir;
  auto cfg = small_config(dir.path / "out");
  // fixture that misses most test candidates: apply_fixture throws mid-run
  const fs::path fixture_path = dir.path / "broken.csv";
  std::ofstream(fixture_path) << "id,name,service,inferred_label\n1,x,svc,dis\n";
  cfg.fixture_paths = {fixture_path};
  REQUIRE_THROWS(run_experiment(cfg));
  const std::string csv = slurp(dir.path / "out" / "results.csv");
  REQUIRE(csv.find("# FAILED") != std::string::npos);
  REQUIRE(csv.find("scenario") != std::string::npos);  // the sweep rows made it out
}

TEST_CASE("render_charts_from_csv rebuilds charts from a results file") {
  TempDir dir;
  const auto cfg = small_config(dir.path / "out");
  const auto result = run_experiment(cfg);
  const auto charts = render_charts_from_csv(result.results_csv, dir.path / "rebuilt");
  REQUIRE(charts.size() == 3);  // one direction, three metrics
  for (const auto& chart : charts) REQUIRE(fs::exists(chart));
}
