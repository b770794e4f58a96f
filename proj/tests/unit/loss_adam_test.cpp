#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "tabgen/adam.hpp"
#include "tabgen/error.hpp"
#include "tabgen/loss.hpp"

namespace tabgen::nn {
namespace {

TEST(BinaryCrossEntropy, Examples) {
  EXPECT_NEAR(binary_cross_entropy(0.5, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(binary_cross_entropy(1.0 - 1e-7, 1.0), 1e-7, 1e-12);
  EXPECT_NEAR(binary_cross_entropy(0.9, 0.0), 2.302585092994046, 1e-12);
}

TEST(BinaryCrossEntropy, ClampsBoundaries) {
  const double at_one = binary_cross_entropy(1.0, 0.0);
  EXPECT_TRUE(std::isfinite(at_one));
  EXPECT_NEAR(at_one, -std::log(kProbabilityClamp), 1e-9);
  EXPECT_EQ(binary_cross_entropy_gradient(0.0, 1.0), 0.0);
}

TEST(BinaryCrossEntropy, NonNegative) {
  for (double p = 0.0; p <= 1.0; p += 0.01) {
    EXPECT_GE(binary_cross_entropy(p, 0.0), 0.0);
    EXPECT_GE(binary_cross_entropy(p, 1.0), 0.0);
  }
}

TEST(BinaryCrossEntropy, GradientMatchesDerivative) {
  for (double p : {0.1, 0.3, 0.5, 0.77, 0.95}) {
    for (double t : {0.0, 1.0}) {
      const double h = 1e-6;
      const double fd = (binary_cross_entropy(p + h, t) - binary_cross_entropy(p - h, t)) / (2 * h);
      EXPECT_NEAR(binary_cross_entropy_gradient(p, t), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(BinaryCrossEntropy, MeanOverBatch) {
  const auto r = mean_binary_cross_entropy(Matrix{{0.5}, {0.9}}, 1.0);
  EXPECT_NEAR(r.value, 0.5 * (std::log(2.0) - std::log(0.9)), 1e-15);
  EXPECT_NEAR(r.gradient(1, 0), -0.5 / 0.9, 1e-15);
  EXPECT_THROW(mean_binary_cross_entropy(Matrix(), 1.0), Error);
}

TEST(SquaredError, SumOverFeaturesMeanOverRows) {
  const auto r = mean_squared_error_sum(Matrix{{1, 2}, {0, 0}}, Matrix{{0, 0}, {3, 0}});
  EXPECT_DOUBLE_EQ(r.value, (1 + 4 + 9) / 2.0);
  EXPECT_DOUBLE_EQ(r.gradient(1, 0), -3.0);
}

void step(std::vector<double>& p, const std::vector<double>& g, AdamState& s) {
  const std::vector<std::span<double>> params = {std::span<double>(p)};
  const std::vector<std::span<const double>> grads = {std::span<const double>(g)};
  adam_update(params, grads, s);
}

TEST(AdamUpdate, ZeroGradientLeavesParameters) {
  std::vector<double> p = {1.0, -2.0, 3.5};
  auto s = make_adam_state(3);
  for (int i = 0; i < 5; ++i) step(p, {0, 0, 0}, s);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 3.5}));
  EXPECT_EQ(s.step_count, 5u);
}

TEST(AdamUpdate, FirstStepMovesByLearningRate) {
  std::vector<double> p = {0.0};
  auto s = make_adam_state(1, {.learning_rate = 0.01});
  step(p, {1.0}, s);
  // m_hat = 1, v_hat = 1, so the step is lr / (1 + eps).
  EXPECT_NEAR(p[0], -0.01 / (1.0 + 1e-8), 1e-18);
}

TEST(AdamUpdate, HandRecurrenceSecondStep) {
  std::vector<double> p = {0.5};
  auto s = make_adam_state(1);
  step(p, {2.0}, s);
  step(p, {-1.0}, s);
  double m = 0.0, v = 0.0, x = 0.5;
  for (int t = 1; t <= 2; ++t) {
    const double g = t == 1 ? 2.0 : -1.0;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    x -= 1e-3 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(p[0], x, 1e-15);
}

TEST(AdamUpdate, Deterministic) {
  std::vector<double> a = {0.3, -0.4};
  std::vector<double> b = a;
  auto sa = make_adam_state(2);
  auto sb = make_adam_state(2);
  step(a, {0.1, 0.7}, sa);
  step(b, {0.1, 0.7}, sb);
  EXPECT_EQ(a, b);
  EXPECT_EQ(sa.first_moment, sb.first_moment);
}

TEST(AdamUpdate, ShapeMismatch) {
  std::vector<double> p = {0.0, 0.0};
  auto s = make_adam_state(2);
  EXPECT_THROW(step(p, {1.0}, s), DimensionError);
  auto wrong = make_adam_state(3);
  EXPECT_THROW(step(p, {1.0, 1.0}, wrong), DimensionError);
}

}  // namespace
}  // namespace tabgen::nn
