#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairrank/domain.hpp"
#include "fairrank/ingest.hpp"

namespace fairrank {

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 500;
  std::uint64_t seed = 0;
  // Appends the protected attribute as a feature column: 1 for
  // disadvantaged, 0 for advantaged. Training always reads ground truth.
  bool include_attribute = false;
};

struct TopOneDistribution {
  std::vector<double> probabilities;
};

// Softmax with max subtraction: the probability of each item ranking first.
inline TopOneDistribution top_one(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("top_one: empty score vector");
  double mx = scores[0];
  for (double s : scores) {
    if (!std::isfinite(s))
      throw std::invalid_argument("top_one: non-finite score");
    mx = std::max(mx, s);
  }
  TopOneDistribution dist;
  dist.probabilities.reserve(scores.size());
  double sum = 0.0;
  for (double s : scores) {
    const double e = std::exp(s - mx);
    dist.probabilities.push_back(e);
    sum += e;
  }
  for (double& p : dist.probabilities) p /= sum;
  return dist;
}

namespace detail {

inline std::vector<double> log_top_one(std::span<const double> scores) {
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - mx);
  const double lse = std::log(sum);
  std::vector<double> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s - mx - lse);
  return out;
}

}  // namespace detail

// Cross-entropy between the top-one distributions of target and predicted
// scores. Invariant under adding a constant to either vector.
inline double listnet_loss(std::span<const double> predicted,
                           std::span<const double> target) {
  if (predicted.size() != target.size())
    throw std::invalid_argument("listnet_loss: length mismatch");
  if (predicted.size() < 2)
    throw std::invalid_argument("listnet_loss: need at least two items");
  const auto log_p = detail::log_top_one(predicted);
  const auto q = top_one(target).probabilities;
  double loss = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) loss -= q[i] * log_p[i];
  return loss;
}

namespace detail {

inline std::vector<double> scores_for(std::span<const double> weights,
                                      const std::vector<std::vector<double>>& rows) {
  std::vector<double> s;
  s.reserve(rows.size());
  for (const auto& x : rows) {
    if (x.size() != weights.size())
      throw std::invalid_argument("scores_for: feature/weight dimension mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += weights[j] * x[j];
    s.push_back(acc);
  }
  return s;
}

}  // namespace detail

// Analytic gradient of listnet_loss for the linear scorer:
// sum_i (P_pred(i) - P_target(i)) * x_i.
inline std::vector<double> listnet_gradient(std::span<const double> weights,
                                            const std::vector<std::vector<double>>& rows,
                                            std::span<const double> judgments) {
  if (rows.size() != judgments.size())
    throw std::invalid_argument("listnet_gradient: row/judgment count mismatch");
  const auto scores = detail::scores_for(weights, rows);
  const auto p = top_one(scores).probabilities;
  const auto q = top_one(judgments).probabilities;
  std::vector<double> grad(weights.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double delta = p[i] - q[i];
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += delta * rows[i][j];
  }
  return grad;
}

namespace detail {

struct DescentResult {
  std::vector<double> weights;
  std::vector<double> loss_trace;
};

// Full-batch gradient descent from zero weights. If a step would increase
// the loss, the step size is halved and the step retried, so the recorded
// trace is non-increasing. A step that can no longer be shrunk ends training
// at the current point.
inline DescentResult gradient_descent(
    std::size_t dim,
    const std::function<double(std::span<const double>)>& loss_fn,
    const std::function<std::vector<double>(std::span<const double>)>& grad_fn,
    double learning_rate, int epochs) {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("learning rate must be positive");
  if (epochs < 0) throw std::invalid_argument("epochs must be nonnegative");

  DescentResult result;
  result.weights.assign(dim, 0.0);
  double loss = loss_fn(result.weights);
  if (!std::isfinite(loss))
    throw std::runtime_error(
        "training diverged: non-finite loss; reduce the learning rate");
  result.loss_trace.push_back(loss);

  double step = learning_rate;
  std::vector<double> trial(dim, 0.0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const auto grad = grad_fn(result.weights);
    for (double g : grad)
      if (!std::isfinite(g))
        throw std::runtime_error(
            "training diverged: non-finite gradient; reduce the learning rate");
    bool accepted = false;
    while (step > 1e-300) {
      for (std::size_t j = 0; j < dim; ++j)
        trial[j] = result.weights[j] - step * grad[j];
      const double trial_loss = loss_fn(trial);
      if (std::isfinite(trial_loss) && trial_loss <= loss) {
        result.weights = trial;
        loss = trial_loss;
        result.loss_trace.push_back(loss);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stuck at a flat point, nothing left to do
  }
  return result;
}

struct TrainingData {
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::vector<GroupLabel> groups;
};

inline TrainingData build_training_data(const Dataset& data, bool include_attribute) {
  TrainingData td;
  td.rows.reserve(data.size());
  td.targets.reserve(data.size());
  td.groups.reserve(data.size());
  for (const auto& c : data.candidates) {
    std::vector<double> x = c.features;
    if (include_attribute)
      x.push_back(c.true_group == GroupLabel::Disadvantaged ? 1.0 : 0.0);
    td.rows.push_back(std::move(x));
    td.targets.push_back(c.judgment);
    td.groups.push_back(c.true_group);
  }
  return td;
}

}  // namespace detail

inline constexpr const char* kAttributeFeatureName = "protected_attribute";

// Trained linear scorer together with everything needed to apply and audit
// it: the training-split normalization, the config, the loss trace and (for
// fairness-aware training) gamma and its selection trace.
struct LinearRanker {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  bool uses_attribute = false;
  NormalizationStats norm;  // empty means features are used as-is
  TrainConfig config;
  double gamma = 0.0;
  std::vector<double> loss_trace;
  std::vector<std::string> training_notes;
};

// How the attribute column is filled at scoring time.
enum class AttributeMode { GroundTruth, Inferred, Hidden };

inline const char* to_string(AttributeMode m) {
  switch (m) {
    case AttributeMode::GroundTruth: return "ground_truth";
    case AttributeMode::Inferred: return "inferred";
    case AttributeMode::Hidden: return "hidden";
  }
  return "?";
}

inline double attribute_value(const Candidate& c, AttributeMode mode) {
  switch (mode) {
    case AttributeMode::GroundTruth:
      return c.true_group == GroupLabel::Disadvantaged ? 1.0 : 0.0;
    case AttributeMode::Inferred:
      if (!c.observed_group)
        throw std::runtime_error("candidate " + std::to_string(c.id) +
                                 " has an unresolved observed group; resolve "
                                 "unknowns before inferred-mode scoring");
      return *c.observed_group == GroupLabel::Disadvantaged ? 1.0 : 0.0;
    case AttributeMode::Hidden:
      return 1.0;  // same constant for every candidate
  }
  throw std::logic_error("unreachable attribute mode");
}

// ListNet training on an already-normalized dataset (see apply_normalization).
// The returned model has empty normalization stats; the experiment harness
// attaches the fitted stats so the model can score raw candidates.
inline LinearRanker train(const Dataset& normalized_train, const TrainConfig& config) {
  if (normalized_train.size() < 2)
    throw std::invalid_argument("train: need at least two candidates");
  const auto td = detail::build_training_data(normalized_train, config.include_attribute);
  const std::size_t dim = td.rows.front().size();

  auto loss_fn = [&](std::span<const double> w) {
    return listnet_loss(detail::scores_for(w, td.rows), td.targets);
  };
  auto grad_fn = [&](std::span<const double> w) {
    return listnet_gradient(w, td.rows, td.targets);
  };
  auto descent = detail::gradient_descent(dim, loss_fn, grad_fn,
                                          config.learning_rate, config.epochs);

  LinearRanker model;
  model.feature_names = normalized_train.feature_names;
  if (config.include_attribute) model.feature_names.push_back(kAttributeFeatureName);
  model.weights = std::move(descent.weights);
  model.uses_attribute = config.include_attribute;
  model.config = config;
  model.loss_trace = std::move(descent.loss_trace);
  return model;
}

// Score candidates and rank them. The model's stored normalization is applied
// to the raw features; the attribute column (when the model has one) is
// filled per `mode`. Models without the attribute ignore `mode`.
inline Ranking score(const LinearRanker& model, const Dataset& data, AttributeMode mode) {
  std::vector<RankedItem> scored;
  scored.reserve(data.size());
  for (const auto& c : data.candidates) {
    std::vector<double> x = normalize_features(model.norm, c.features);
    if (model.uses_attribute) x.push_back(attribute_value(c, mode));
    if (x.size() != model.weights.size())
      throw std::invalid_argument(
          "score: candidate " + std::to_string(c.id) + " has " +
          std::to_string(x.size()) + " model inputs, expected " +
          std::to_string(model.weights.size()));
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += model.weights[j] * x[j];
    scored.push_back({c.id, s});
  }
  return rank_by_score(std::move(scored));
}

inline nlohmann::json to_json(const NormalizationStats& stats) {
  nlohmann::json j;
  j["judgment_min"] = stats.judgment_min;
  j["judgment_max"] = stats.judgment_max;
  j["features"] = nlohmann::json::array();
  for (const auto& f : stats.features)
    j["features"].push_back({{"name", f.name},
                             {"mean", f.mean},
                             {"sd", f.sd},
                             {"dropped", f.dropped}});
  return j;
}

inline NormalizationStats stats_from_json(const nlohmann::json& j) {
  NormalizationStats stats;
  stats.judgment_min = j.at("judgment_min").get<double>();
  stats.judgment_max = j.at("judgment_max").get<double>();
  for (const auto& fj : j.at("features")) {
    FeatureStat f;
    f.name = fj.at("name").get<std::string>();
    f.mean = fj.at("mean").get<double>();
    f.sd = fj.at("sd").get<double>();
    f.dropped = fj.at("dropped").get<bool>();
    stats.features.push_back(std::move(f));
  }
  return stats;
}

inline nlohmann::json to_json(const LinearRanker& model) {
  nlohmann::json j;
  j["feature_names"] = model.feature_names;
  j["weights"] = model.weights;
  j["uses_attribute"] = model.uses_attribute;
  j["normalization"] = to_json(model.norm);
  j["config"] = {{"learning_rate", model.config.learning_rate},
                 {"epochs", model.config.epochs},
                 {"seed", model.config.seed},
                 {"include_attribute", model.config.include_attribute}};
  j["gamma"] = model.gamma;
  j["loss_trace"] = model.loss_trace;
  j["training_notes"] = model.training_notes;
  return j;
}

inline LinearRanker ranker_from_json(const nlohmann::json& j) {
  LinearRanker model;
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.uses_attribute = j.at("uses_attribute").get<bool>();
  model.norm = stats_from_json(j.at("normalization"));
  model.config.learning_rate = j.at("config").at("learning_rate").get<double>();
  model.config.epochs = j.at("config").at("epochs").get<int>();
  model.config.seed = j.at("config").at("seed").get<std::uint64_t>();
  model.config.include_attribute = j.at("config").at("include_attribute").get<bool>();
  model.gamma = j.at("gamma").get<double>();
  model.loss_trace = j.at("loss_trace").get<std::vector<double>>();
  model.training_notes = j.at("training_notes").get<std::vector<std::string>>();
  return model;
}

inline void save_model(const LinearRanker& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << to_json(model).dump(2) << "\n";
}

inline LinearRanker load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  nlohmann::json j;
  in >> j;
  return ranker_from_json(j);
}

}  // namespace fairrank
