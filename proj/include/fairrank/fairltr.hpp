#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/csv.hpp"
#include "fairrank/listwise.hpp"

namespace fairrank {

struct FairTrainingConfig {
  double gamma = 0.0;  // 0 reduces exactly to plain listwise training
  TrainConfig base;
};

// Disparate-exposure penalty: the squared one-sided gap between the group
// means of the top-one probabilities,
//   U = max(0, meanExp(adv) - meanExp(dis))^2.
// Only under-exposure of the disadvantaged group is penalized.
inline double disparate_exposure(std::span<const double> scores,
                                 std::span<const GroupLabel> groups) {
  if (scores.size() != groups.size())
    throw std::invalid_argument("disparate_exposure: score/group length mismatch");
  const auto p = top_one(scores).probabilities;
  double sum_dis = 0.0, sum_adv = 0.0;
  std::size_t n_dis = 0, n_adv = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (groups[i] == GroupLabel::Disadvantaged) {
      sum_dis += p[i];
      ++n_dis;
    } else {
      sum_adv += p[i];
      ++n_adv;
    }
  }
  if (n_dis == 0 || n_adv == 0)
    throw std::invalid_argument("disparate_exposure: both groups must be present");
  const double gap = sum_adv / static_cast<double>(n_adv) -
                     sum_dis / static_cast<double>(n_dis);
  return gap > 0.0 ? gap * gap : 0.0;
}

// listnet_loss + gamma * disparate_exposure over the linear scorer.
inline double deltr_loss(std::span<const double> weights,
                         const std::vector<std::vector<double>>& rows,
                         std::span<const double> judgments,
                         std::span<const GroupLabel> groups, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("deltr_loss: gamma must be >= 0");
  const auto scores = detail::scores_for(weights, rows);
  double loss = listnet_loss(scores, judgments);
  if (gamma > 0.0) loss += gamma * disparate_exposure(scores, groups);
  return loss;
}

// Analytic gradient of deltr_loss. In the clamp-inactive region (the
// disadvantaged group at or above parity) the penalty term contributes
// nothing and the result is exactly the listnet gradient; the subgradient at
// the kink itself is taken as 0.
inline std::vector<double> deltr_gradient(std::span<const double> weights,
                                          const std::vector<std::vector<double>>& rows,
                                          std::span<const double> judgments,
                                          std::span<const GroupLabel> groups,
                                          double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("deltr_gradient: gamma must be >= 0");
  auto grad = listnet_gradient(weights, rows, judgments);
  if (gamma == 0.0) return grad;

  const auto scores = detail::scores_for(weights, rows);
  const auto p = top_one(scores).probabilities;
  double sum_dis = 0.0, sum_adv = 0.0;
  std::size_t n_dis = 0, n_adv = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (groups[i] == GroupLabel::Disadvantaged) {
      sum_dis += p[i];
      ++n_dis;
    } else {
      sum_adv += p[i];
      ++n_adv;
    }
  }
  if (n_dis == 0 || n_adv == 0)
    throw std::invalid_argument("deltr_gradient: both groups must be present");
  const double gap = sum_adv / static_cast<double>(n_adv) -
                     sum_dis / static_cast<double>(n_dis);
  if (gap <= 0.0) return grad;

  const std::size_t dim = weights.size();
  // dP_i/dw = P_i (x_i - xbar) with xbar = sum_j P_j x_j.
  std::vector<double> xbar(dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) xbar[j] += p[i] * rows[i][j];

  std::vector<double> dgap(dim, 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double a = groups[i] == GroupLabel::Advantaged
                         ? 1.0 / static_cast<double>(n_adv)
                         : -1.0 / static_cast<double>(n_dis);
    const double w = a * p[i];
    for (std::size_t j = 0; j < dim; ++j) dgap[j] += w * (rows[i][j] - xbar[j]);
  }
  const double scale = gamma * 2.0 * gap;
  for (std::size_t j = 0; j < dim; ++j) grad[j] += scale * dgap[j];
  return grad;
}

struct GammaSelection {
  double gamma = 0.0;
  double loss_at_zero = 0.0;      // listnet loss at the gamma = 0 optimum
  double exposure_at_zero = 0.0;  // disparate exposure there
  std::vector<std::string> trace;
};

// Default heuristic gamma = L0 / U0, the ratio of the ranking loss to the
// exposure penalty at the fairness-unaware optimum. Returns 0 when the
// unaware model already has no disparate exposure.
inline GammaSelection select_gamma(const Dataset& normalized_train,
                                   const TrainConfig& base) {
  const LinearRanker unaware = train(normalized_train, base);
  const auto td = detail::build_training_data(normalized_train, base.include_attribute);
  const auto scores = detail::scores_for(unaware.weights, td.rows);

  GammaSelection sel;
  sel.loss_at_zero = listnet_loss(scores, td.targets);
  sel.exposure_at_zero = disparate_exposure(scores, td.groups);
  if (sel.exposure_at_zero < 1e-12) {
    sel.gamma = 0.0;
    sel.trace.push_back("U0 < 1e-12 at the unaware optimum; gamma = 0");
  } else {
    sel.gamma = sel.loss_at_zero / sel.exposure_at_zero;
    sel.trace.push_back("gamma = L0/U0 = " + format_double(sel.loss_at_zero) + "/" +
                        format_double(sel.exposure_at_zero) + " = " +
                        format_double(sel.gamma));
  }
  return sel;
}

// Fairness-aware training: gradient descent on deltr_loss. Groups are always
// ground truth; inference noise only ever enters at scoring time.
inline LinearRanker train_fair(const Dataset& normalized_train,
                               const FairTrainingConfig& config) {
  if (normalized_train.size() < 2)
    throw std::invalid_argument("train_fair: need at least two candidates");
  if (config.gamma < 0.0)
    throw std::invalid_argument("train_fair: gamma must be >= 0");
  const auto td = detail::build_training_data(normalized_train,
                                              config.base.include_attribute);
  const std::size_t dim = td.rows.front().size();

  auto loss_fn = [&](std::span<const double> w) {
    return deltr_loss(w, td.rows, td.targets, td.groups, config.gamma);
  };
  auto grad_fn = [&](std::span<const double> w) {
    return deltr_gradient(w, td.rows, td.targets, td.groups, config.gamma);
  };
  auto descent = detail::gradient_descent(dim, loss_fn, grad_fn,
                                          config.base.learning_rate,
                                          config.base.epochs);

  LinearRanker model;
  model.feature_names = normalized_train.feature_names;
  if (config.base.include_attribute)
    model.feature_names.push_back(kAttributeFeatureName);
  model.weights = std::move(descent.weights);
  model.uses_attribute = config.base.include_attribute;
  model.config = config.base;
  model.gamma = config.gamma;
  model.loss_trace = std::move(descent.loss_trace);
  return model;
}

struct AutoFairResult {
  LinearRanker model;
  GammaSelection selection;
  int doublings = 0;
  double final_exposure = 0.0;
};

// Auto-tuned fairness-aware training: pick gamma with select_gamma, train,
// then double gamma (at most three times) while the post-training exposure
// penalty is still above `relative_u_threshold * U0`. Each step is recorded
// in the model's training notes, including a convergence check on the trace.
inline AutoFairResult train_fair_auto(const Dataset& normalized_train,
                                      const TrainConfig& base,
                                      double relative_u_threshold = 0.05) {
  AutoFairResult result;
  result.selection = select_gamma(normalized_train, base);
  const auto td = detail::build_training_data(normalized_train, base.include_attribute);
  const double u_target = result.selection.exposure_at_zero * relative_u_threshold;

  double gamma = result.selection.gamma;
  for (int attempt = 0;; ++attempt) {
    result.model = train_fair(normalized_train, {gamma, base});
    const auto scores = detail::scores_for(result.model.weights, td.rows);
    result.final_exposure = disparate_exposure(scores, td.groups);
    result.selection.trace.push_back(
        "gamma = " + format_double(gamma) +
        ": post-training U = " + format_double(result.final_exposure));
    if (gamma == 0.0 || result.final_exposure <= u_target || attempt >= 3) break;
    gamma *= 2.0;
    result.doublings = attempt + 1;
  }

  const auto& trace = result.model.loss_trace;
  if (trace.size() >= 2) {
    const std::size_t tail = std::max<std::size_t>(1, trace.size() / 10);
    const double drop = trace[trace.size() - 1 - tail] - trace.back();
    result.selection.trace.push_back(
        "convergence: loss drop over final decile = " + format_double(drop));
  }
  result.model.training_notes = result.selection.trace;
  return result;
}

}  // namespace fairrank
