#include "medclaim/model/sigmoid_fit.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "medclaim/error.hpp"
#include "medclaim/model/logistic.hpp"

namespace medclaim::model {

namespace {

void check_interval(double bound, std::size_t grid_points, std::size_t n_terms) {
  if (!(bound > 0) || !std::isfinite(bound)) fail(ErrorCode::InvalidInterval, "fit bound must be positive and finite");
  if (grid_points < std::max<std::size_t>(4, n_terms)) fail(ErrorCode::InvalidInterval, "grid too small for the fit");
}

double grid_x(double bound, std::size_t i, std::size_t n) {
  return -bound + 2.0 * bound * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

std::vector<double> fit_sigmoid_powers(double bound, std::size_t grid_points, const std::vector<int>& powers) {
  check_interval(bound, grid_points, powers.size());
  const auto n = static_cast<Eigen::Index>(grid_points);
  const auto k = static_cast<Eigen::Index>(powers.size());
  // Columns use t = x / bound so the design matrix stays well conditioned.
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = grid_x(bound, static_cast<std::size_t>(i), grid_points);
    double t = x / bound;
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = std::pow(t, powers[static_cast<std::size_t>(j)]);
    b(i) = sigmoid(x);
  }
  Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  std::vector<double> out(powers.size());
  for (std::size_t j = 0; j < powers.size(); ++j) out[j] = c(static_cast<Eigen::Index>(j)) / std::pow(bound, powers[j]);
  return out;
}

SigmoidFit fit_sigmoid_poly(double bound, std::size_t grid_points) {
  auto c = fit_sigmoid_powers(bound, grid_points, {0, 1, 3});
  SigmoidFit fit;
  fit.poly = {c[0], c[1], c[2]};
  fit.bound = bound;
  for (std::size_t i = 0; i < grid_points; ++i) {
    double x = grid_x(bound, i, grid_points);
    fit.max_err = std::max(fit.max_err, std::abs(fit.poly(x) - sigmoid(x)));
  }
  return fit;
}

}  // namespace medclaim::model
