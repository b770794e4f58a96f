#include "tabgen/loss.hpp"

#include <algorithm>
#include <cmath>

#include "tabgen/error.hpp"

namespace tabgen::nn {

double binary_cross_entropy(double prediction, double target) {
  const double p = std::clamp(prediction, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -(target * std::log(p) + (1.0 - target) * std::log1p(-p));
}

double binary_cross_entropy_gradient(double prediction, double target) {
  if (prediction < kProbabilityClamp || prediction > 1.0 - kProbabilityClamp) return 0.0;
  return -target / prediction + (1.0 - target) / (1.0 - prediction);
}

LossWithGradient mean_binary_cross_entropy(const Matrix& predictions, double target) {
  if (predictions.empty()) throw Error("binary cross-entropy of an empty batch");
  LossWithGradient out{0.0, Matrix(predictions.rows(), predictions.cols())};
  const double scale = 1.0 / static_cast<double>(predictions.size());
  auto p = predictions.data();
  auto g = out.gradient.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.value += binary_cross_entropy(p[i], target);
    g[i] = scale * binary_cross_entropy_gradient(p[i], target);
  }
  out.value *= scale;
  return out;
}

LossWithGradient mean_squared_error_sum(const Matrix& predictions, const Matrix& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    throw DimensionError("squared error operands differ in shape");
  }
  if (predictions.empty()) throw Error("squared error of an empty batch");
  LossWithGradient out{0.0, Matrix(predictions.rows(), predictions.cols())};
  const double scale = 1.0 / static_cast<double>(predictions.rows());
  auto p = predictions.data();
  auto t = targets.data();
  auto g = out.gradient.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    out.value += d * d;
    g[i] = 2.0 * scale * d;
  }
  out.value *= scale;
  return out;
}

}  // namespace tabgen::nn
