#pragma once

#include <vector>

#include "medclaim/he/evaluator.hpp"

namespace medclaim::model {

inline constexpr double kDefaultFitBound = 5.0;
inline constexpr std::size_t kDefaultFitGrid = 2001;

struct SigmoidFit {
  he::OddCubic poly;
  double bound = kDefaultFitBound;  // fitted on [-bound, bound]
  double max_err = 0.0;             // max |poly - sigmoid| over the grid
};

/// Least-squares fit of the sigmoid by c0 + c1 x + c3 x^3 on a uniform grid
/// over [-bound, bound]. Throws InvalidInterval unless bound > 0 and the
/// grid has at least four points.
SigmoidFit fit_sigmoid_poly(double bound = kDefaultFitBound, std::size_t grid_points = kDefaultFitGrid);

/// Coefficients of sum_k c_k x^powers[k] fitted to the sigmoid on the same
/// grid, in the order of `powers`.
std::vector<double> fit_sigmoid_powers(double bound, std::size_t grid_points, const std::vector<int>& powers);

}  // namespace medclaim::model
