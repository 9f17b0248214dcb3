#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "medclaim/model/record.hpp"

namespace medclaim::model {

using Matrix = std::vector<std::vector<double>>;

struct LinearModel {
  std::vector<double> beta;
  double intercept = 0.0;
};

struct LossAndGradient {
  double loss = 0.0;                // mean negative log-likelihood
  std::vector<double> grad_beta;
  double grad_intercept = 0.0;
};

LossAndGradient logistic_loss_grad(const Matrix& x, std::span<const int> y, const LinearModel& m);

struct TrainOptions {
  double learning_rate = 0.1;
  int epochs = 1000;
};

/// Full-batch gradient descent from zero weights. No randomness is involved,
/// so equal inputs always give equal weights.
LinearModel train_logistic(const Matrix& x, std::span<const int> y, const TrainOptions& opt = {});

double sigmoid(double z);
double linear_score(std::span<const double> x, const LinearModel& m);
double accuracy(const Matrix& x, std::span<const int> y, const LinearModel& m);

Matrix to_matrix(const std::vector<FeatureVector>& rows);

enum class Verdict { Approved, Denied };
std::string_view to_string(Verdict v);

inline constexpr double kThreshold = 0.5;

struct ClaimDecision {
  double probability = 0.0;
  Verdict verdict = Verdict::Denied;
};

/// Approved iff p > 0.5; throws OutOfRange outside [0, 1].
ClaimDecision decide(double probability);

}  // namespace medclaim::model
