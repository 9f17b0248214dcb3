#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "medclaim/model/dataset.hpp"
#include "medclaim/model/logistic.hpp"
#include "medclaim/model/sigmoid_fit.hpp"

namespace medclaim::model {

struct ModelWeights {
  FeatureVector beta{};
  double intercept = 0.0;
  NormStats norm;
  SigmoidFit sigmoid;
  double threshold = kThreshold;
  std::optional<LabelRule> label_rule;  // absent when trained on explicit labels

  LinearModel linear() const { return {{beta.begin(), beta.end()}, intercept}; }
};

/// z = beta . x + b on standardized features.
double score(const FeatureVector& x, const ModelWeights& w);
/// Exact sigmoid of the score.
double predict_plain(const FeatureVector& x, const ModelWeights& w);
/// What the encrypted circuit computes: the fitted cubic of the score.
double circuit_replica(const FeatureVector& x, const ModelWeights& w);

std::string to_json(const ModelWeights& w);
ModelWeights model_from_json(const std::string& text);
void save_model(const std::filesystem::path& path, const ModelWeights& w);
ModelWeights load_model(const std::filesystem::path& path);

}  // namespace medclaim::model
