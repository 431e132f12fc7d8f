#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fairrank/detconstsort.hpp"
#include "fairrank/fairltr.hpp"
#include "fairrank/listwise.hpp"

namespace fairrank {

enum class StrategyKind {
  Oblivious,
  LTR,
  Hidden,
  FairLTR,
  ObliviousFairRR,
  LTRFairRR,
  HiddenFairRR,
};

enum class TrainingAttr { None, GroundTruth };
enum class TestingAttr { None, Inferred, Hidden };
enum class RerankAttr { None, Inferred };

// One ranking strategy: how the protected attribute is used during training,
// testing (ranking) and re-ranking. Only the seven canonical combinations
// are constructible through the stable surface.
class StrategySpec {
 public:
  StrategyKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  TrainingAttr training_attr() const { return training_; }
  TestingAttr testing_attr() const { return testing_; }
  RerankAttr rerank_attr() const { return rerank_; }
  bool fairness_aware() const {
    return kind_ == StrategyKind::FairLTR || rerank_ == RerankAttr::Inferred;
  }

  static StrategySpec of(StrategyKind kind) {
    switch (kind) {
      case StrategyKind::Oblivious:
        return {kind, "Oblivious", TrainingAttr::None, TestingAttr::None, RerankAttr::None};
      case StrategyKind::LTR:
        return {kind, "LTR", TrainingAttr::GroundTruth, TestingAttr::Inferred, RerankAttr::None};
      case StrategyKind::Hidden:
        return {kind, "Hidden", TrainingAttr::GroundTruth, TestingAttr::Hidden, RerankAttr::None};
      case StrategyKind::FairLTR:
        return {kind, "FairLTR", TrainingAttr::GroundTruth, TestingAttr::Inferred, RerankAttr::None};
      case StrategyKind::ObliviousFairRR:
        return {kind, "Oblivious+FairRR", TrainingAttr::None, TestingAttr::None, RerankAttr::Inferred};
      case StrategyKind::LTRFairRR:
        // scoring and re-ranking read the same resolved labels of the test set
        return {kind, "LTR+FairRR", TrainingAttr::GroundTruth, TestingAttr::Inferred, RerankAttr::Inferred};
      case StrategyKind::HiddenFairRR:
        return {kind, "Hidden+FairRR", TrainingAttr::GroundTruth, TestingAttr::Hidden, RerankAttr::Inferred};
    }
    throw std::logic_error("unknown strategy kind");
  }

  // Research escape hatch for combinations outside the canonical seven.
  // Not part of the stable surface; results are not comparable to the
  // standard benchmark.
  static StrategySpec unstable_custom(std::string name, TrainingAttr training,
                                      TestingAttr testing, RerankAttr rerank) {
    return {StrategyKind::Oblivious, std::move(name), training, testing, rerank};
  }

 private:
  StrategySpec(StrategyKind kind, std::string name, TrainingAttr training,
               TestingAttr testing, RerankAttr rerank)
      : kind_(kind), name_(std::move(name)), training_(training),
        testing_(testing), rerank_(rerank) {}

  StrategyKind kind_;
  std::string name_;
  TrainingAttr training_;
  TestingAttr testing_;
  RerankAttr rerank_;
};

// The seven strategies in canonical order: the three fairness-unaware ones,
// then the four fairness-aware ones.
inline const std::vector<StrategySpec>& all_strategies() {
  static const std::vector<StrategySpec> strategies = {
      StrategySpec::of(StrategyKind::Oblivious),
      StrategySpec::of(StrategyKind::LTR),
      StrategySpec::of(StrategyKind::Hidden),
      StrategySpec::of(StrategyKind::FairLTR),
      StrategySpec::of(StrategyKind::ObliviousFairRR),
      StrategySpec::of(StrategyKind::LTRFairRR),
      StrategySpec::of(StrategyKind::HiddenFairRR),
  };
  return strategies;
}

// The three models every experiment trains once per dataset:
//   oblivious       — no attribute column,
//   with_attribute  — attribute column, fairness-unaware,
//   fair            — attribute column plus the exposure penalty.
struct ModelSet {
  LinearRanker oblivious;
  LinearRanker with_attribute;
  LinearRanker fair;
};

struct StrategyOutput {
  Ranking scored;    // after the scoring stage
  Ranking reranked;  // equal to `scored` when no re-ranking applies
  bool rerank_applied = false;

  const Ranking& final() const { return reranked; }
};

namespace detail {

inline const LinearRanker& model_for(const StrategySpec& spec, const ModelSet& models) {
  const LinearRanker* model = nullptr;
  if (spec.kind() == StrategyKind::FairLTR)
    model = &models.fair;
  else if (spec.training_attr() == TrainingAttr::None)
    model = &models.oblivious;
  else
    model = &models.with_attribute;
  if (model->weights.empty())
    throw std::runtime_error("strategy '" + spec.name() + "' needs a model that has not been trained");
  return *model;
}

}  // namespace detail

// Execute one strategy against a test set whose observed groups are already
// resolved (perturbed or fixture-joined). Scoring reads observed labels only
// in inferred mode; re-ranking reads them for both membership and the target
// proportions.
inline StrategyOutput run_strategy_detailed(const StrategySpec& spec,
                                            const ModelSet& models,
                                            const Dataset& test) {
  const LinearRanker& model = detail::model_for(spec, models);

  AttributeMode mode = AttributeMode::Hidden;
  switch (spec.testing_attr()) {
    case TestingAttr::None:
    case TestingAttr::Hidden:
      mode = AttributeMode::Hidden;
      break;
    case TestingAttr::Inferred:
      mode = AttributeMode::Inferred;
      break;
  }

  StrategyOutput out;
  out.scored = score(model, test, mode);
  if (spec.rerank_attr() == RerankAttr::Inferred) {
    out.reranked = det_const_sort(out.scored, test, target_from_observed(test), test.size());
    out.rerank_applied = true;
  } else {
    out.reranked = out.scored;
  }
  return out;
}

inline Ranking run_strategy(const StrategySpec& spec, const ModelSet& models,
                            const Dataset& test) {
  return run_strategy_detailed(spec, models, test).final();
}

}  // namespace fairrank
