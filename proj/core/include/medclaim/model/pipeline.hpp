#pragma once

#include <cstdint>

#include "medclaim/model/forest.hpp"
#include "medclaim/model/weights.hpp"

namespace medclaim::model {

struct TrainConfig {
  TrainOptions gd;
  double test_fraction = 0.2;
  double label_percentile = 75.0;
  double fit_bound = kDefaultFitBound;
  std::size_t fit_grid = kDefaultFitGrid;
  std::uint64_t seed = 1;  // train/test split and forest bagging
};

struct TrainReport {
  ModelWeights weights;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double forest_test_accuracy = 0.0;
  /// Share of training records with |z| > bound - 1, where the cubic drifts.
  double outside_fit_fraction = 0.0;
};

/// Split, label (unless the dataset carries labels), standardize on the
/// training part, train, fit the sigmoid cubic and score the baseline.
TrainReport train_pipeline(const Dataset& data, const TrainConfig& cfg = {});

}  // namespace medclaim::model
