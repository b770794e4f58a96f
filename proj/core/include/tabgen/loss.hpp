#pragma once

#include <span>

#include "tabgen/matrix.hpp"

namespace tabgen::nn {

inline constexpr double kProbabilityClamp = 1e-7;

/// -[t ln p + (1-t) ln(1-p)] with p clamped to [1e-7, 1 - 1e-7].
double binary_cross_entropy(double prediction, double target);

/// d/dp of binary_cross_entropy; zero where the clamp is active.
double binary_cross_entropy_gradient(double prediction, double target);

struct LossWithGradient {
  double value = 0.0;
  Matrix gradient;  // d(value)/d(predictions), shape of the predictions
};

/// Mean BCE over a column of probabilities against a constant target.
LossWithGradient mean_binary_cross_entropy(const Matrix& predictions, double target);

/// Sum over features, mean over rows, of squared error.
LossWithGradient mean_squared_error_sum(const Matrix& predictions, const Matrix& targets);

}  // namespace tabgen::nn
