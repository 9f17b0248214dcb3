#include "medclaim/model/logistic.hpp"

#include <cmath>

#include "medclaim/error.hpp"

namespace medclaim::model {

namespace {

void check_training_set(const Matrix& x, std::span<const int> y) {
  require(!x.empty(), ErrorCode::EmptyDataset, "training set is empty");
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "feature and label counts differ");
  const std::size_t d = x.front().size();
  for (const auto& row : x) require(row.size() == d, ErrorCode::InvalidArgument, "ragged feature matrix");
  for (int v : y) require(v == 0 || v == 1, ErrorCode::NonBinaryLabels, "labels must be 0 or 1");
}

// log(1 + e^t) without overflow
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double linear_score(std::span<const double> x, const LinearModel& m) {
  double z = m.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) z += m.beta[j] * x[j];
  return z;
}

LossAndGradient logistic_loss_grad(const Matrix& x, std::span<const int> y, const LinearModel& m) {
  const std::size_t n = x.size();
  LossAndGradient out;
  out.grad_beta.assign(m.beta.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double z = linear_score(x[i], m);
    // -[y log s + (1-y) log(1-s)] = softplus(z) - y z
    out.loss += softplus(z) - y[i] * z;
    double r = sigmoid(z) - y[i];
    for (std::size_t j = 0; j < m.beta.size(); ++j) out.grad_beta[j] += r * x[i][j];
    out.grad_intercept += r;
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.loss *= inv;
  for (auto& g : out.grad_beta) g *= inv;
  out.grad_intercept *= inv;
  return out;
}

LinearModel train_logistic(const Matrix& x, std::span<const int> y, const TrainOptions& opt) {
  check_training_set(x, y);
  require(opt.epochs >= 0 && opt.learning_rate > 0, ErrorCode::InvalidArgument, "bad training options");
  LinearModel m{std::vector<double>(x.front().size(), 0.0), 0.0};
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    auto g = logistic_loss_grad(x, y, m);
    for (std::size_t j = 0; j < m.beta.size(); ++j) m.beta[j] -= opt.learning_rate * g.grad_beta[j];
    m.intercept -= opt.learning_rate * g.grad_intercept;
  }
  return m;
}

double accuracy(const Matrix& x, std::span<const int> y, const LinearModel& m) {
  require(!x.empty() && x.size() == y.size(), ErrorCode::InvalidArgument, "accuracy needs matching, non-empty inputs");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    int pred = sigmoid(linear_score(x[i], m)) > kThreshold ? 1 : 0;
    hits += pred == y[i];
  }
  return static_cast<double>(hits) / static_cast<double>(x.size());
}

Matrix to_matrix(const std::vector<FeatureVector>& rows) {
  Matrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.emplace_back(r.begin(), r.end());
  return out;
}

std::string_view to_string(Verdict v) { return v == Verdict::Approved ? "Approved" : "Denied"; }

ClaimDecision decide(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    fail(ErrorCode::OutOfRange, "probability " + std::to_string(probability) + " outside [0, 1]");
  }
  return {probability, probability > kThreshold ? Verdict::Approved : Verdict::Denied};
}

}  // namespace medclaim::model
