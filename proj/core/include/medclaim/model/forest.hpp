#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "medclaim/model/logistic.hpp"

namespace medclaim::model {

struct ForestOptions {
  int trees = 25;
  int max_depth = 8;
  std::size_t min_leaf = 5;
  std::uint64_t seed = 1;
};

/// Plaintext random forest (bagged CART, Gini splits, sqrt(d) features per
/// split). Used only as an accuracy reference next to the logistic model.
class RandomForest {
 public:
  static RandomForest train(const Matrix& x, std::span<const int> y, const ForestOptions& opt = {});

  double predict_proba(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return predict_proba(x) > 0.5 ? 1 : 0; }
  double accuracy(const Matrix& x, std::span<const int> y) const;

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // positive fraction at a leaf
  };
  using Tree = std::vector<Node>;

  std::vector<Tree> trees_;

  friend class TreeBuilder;
};

}  // namespace medclaim::model
