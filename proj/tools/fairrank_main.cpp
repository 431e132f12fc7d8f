// Command-line front end: train models, sweep noise scenarios, run fixture
// studies, generate synthetic datasets and re-render charts.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fairrank/fairrank.hpp"

namespace {

fairrank::ExperimentConfig load_config(const std::string& config_path,
                                       const std::string& out_dir,
                                       std::uint64_t* seed_override) {
  auto cfg = fairrank::parse_config(config_path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed_override) cfg.experiment_seed = *seed_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fair learning-to-rank benchmark harness"};
  app.require_subcommand(1);

  // --- train ---------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "train the three models and save them");
  std::string train_config, train_out;
  train_cmd->add_option("--config", train_config, "experiment config file")->required();
  train_cmd->add_option("--out", train_out, "output directory (overrides output.dir)");

  // --- sweep ---------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "run the full noise-scenario benchmark");
  std::string sweep_config, sweep_out, sweep_direction;
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_set = false;
  sweep_cmd->add_option("--config", sweep_config, "experiment config file")->required();
  sweep_cmd->add_option("--out", sweep_out, "output directory (overrides output.dir)");
  sweep_cmd->add_option("--seed", sweep_seed, "experiment seed override")
      ->each([&](const std::string&) { sweep_seed_set = true; });
  sweep_cmd->add_option("--direction", sweep_direction,
                        "run a single direction: bidirectional, dis-to-adv or adv-to-dis");

  // --- fixtures ------------------------------------------------------------
  auto* fixtures_cmd = app.add_subcommand("fixtures", "evaluate offline inference fixtures");
  std::string fixtures_config, fixtures_out;
  fixtures_cmd->add_option("--config", fixtures_config, "experiment config file")->required();
  fixtures_cmd->add_option("--out", fixtures_out, "output directory (overrides output.dir)");

  // --- synth ---------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset CSV");
  std::string synth_out = "synthetic.csv";
  std::size_t synth_n = 2000;
  double synth_adv = 0.78, synth_bias = 1.0;
  std::uint64_t synth_seed = 1;
  std::string synth_config_out;
  synth_cmd->add_option("--out", synth_out, "CSV path to write");
  synth_cmd->add_option("--n", synth_n, "number of candidates");
  synth_cmd->add_option("--adv-fraction", synth_adv, "advantaged-group fraction");
  synth_cmd->add_option("--bias", synth_bias, "bias strength against the disadvantaged group");
  synth_cmd->add_option("--seed", synth_seed, "generator seed");
  synth_cmd->add_option("--config-out", synth_config_out, "also write a starter config here");

  // --- report --------------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "re-render charts from a results CSV");
  std::string report_results, report_out = "charts";
  report_cmd->add_option("--results", report_results, "results.csv path")->required();
  report_cmd->add_option("--out", report_out, "chart output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      const auto cfg = load_config(train_config, train_out, nullptr);
      std::filesystem::create_directories(cfg.output_dir / "models");
      const auto prep = fairrank::prepare_experiment(cfg);
      fairrank::save_model(prep.models.oblivious, cfg.output_dir / "models" / "oblivious.json");
      fairrank::save_model(prep.models.with_attribute, cfg.output_dir / "models" / "ltr.json");
      fairrank::save_model(prep.models.fair, cfg.output_dir / "models" / "fair.json");
      std::cout << "trained 3 models on " << prep.train_raw.size() << " candidates ("
                << prep.test_raw.size() << " held out)\n";
      std::cout << "gamma = " << fairrank::format_double(prep.gamma_used) << "\n";
      for (const auto& note : prep.gamma_trace) std::cout << "  " << note << "\n";
      if (prep.labels_swapped)
        std::cout << "note: group labels were swapped after skew detection\n";
      std::cout << "models written to " << (cfg.output_dir / "models").string() << "\n";
    } else if (*sweep_cmd) {
      auto cfg = load_config(sweep_config, sweep_out, sweep_seed_set ? &sweep_seed : nullptr);
      if (!sweep_direction.empty())
        cfg.directions = {fairrank::direction_from_string(sweep_direction)};
      const auto result = fairrank::run_experiment(cfg);
      std::cout << "wrote " << result.results_csv.string() << " (" << result.scenario_rows
                << " scenario rows, " << result.mean_rows << " mean rows";
      if (result.fixture_rows) std::cout << ", " << result.fixture_rows << " fixture rows";
      std::cout << ")\n";
      std::cout << "metadata: " << result.metadata_json.string() << "\n";
      std::cout << "charts: " << result.charts.size() << " file(s)\n";
    } else if (*fixtures_cmd) {
      auto cfg = load_config(fixtures_config, fixtures_out, nullptr);
      if (cfg.fixture_paths.empty())
        throw std::runtime_error("fixtures subcommand needs fixtures.paths in the config");
      cfg.directions.clear();  // fixture study only
      const auto result = fairrank::run_experiment(cfg);
      std::cout << "wrote " << result.results_csv.string() << " (" << result.fixture_rows
                << " fixture rows)\n";
    } else if (*synth_cmd) {
      const auto data = fairrank::generate_synthetic(synth_n, synth_adv, synth_bias, synth_seed);
      std::vector<std::vector<std::string>> rows;
      rows.reserve(data.size());
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& c = data.candidates[i];
        rows.push_back({std::to_string(c.id), data.names[i],
                        c.true_group == fairrank::GroupLabel::Disadvantaged ? "dis" : "adv",
                        fairrank::format_double(c.features[0]),
                        fairrank::format_double(c.features[1]),
                        fairrank::format_double(c.features[2]),
                        fairrank::format_double(c.judgment)});
      }
      fairrank::write_csv(synth_out,
                          {"id", "name", "group", "skill", "aux", "spare", "judgment"}, rows);
      std::cout << "wrote " << synth_out << " (" << data.size() << " rows)\n";
      if (!synth_config_out.empty()) {
        std::ofstream out(synth_config_out);
        out << "dataset.name = synthetic\n"
            << "dataset.csv = " << synth_out << "\n"
            << "dataset.id_column = id\n"
            << "dataset.judgment_column = judgment\n"
            << "dataset.group_column = group\n"
            << "dataset.disadvantaged_value = dis\n"
            << "dataset.feature_columns = skill,aux,spare\n"
            << "dataset.name_column = name\n"
            << "split.fraction = 0.8\n"
            << "split.seed = 1\n"
            << "training.learning_rate = 0.05\n"
            << "training.epochs = 500\n"
            << "training.gamma = auto\n"
            << "output.dir = out\n";
        std::cout << "wrote " << synth_config_out << "\n";
      }
    } else if (*report_cmd) {
      const auto charts = fairrank::render_charts_from_csv(report_results, report_out);
      std::cout << "wrote " << charts.size() << " chart(s) to " << report_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
