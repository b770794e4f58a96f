#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "tabgen/error.hpp"
#include "tabgen/gan.hpp"

namespace tabgen::gan {
namespace {

using nn::Matrix;

TEST(GanLosses, DiscriminatorExamples) {
  EXPECT_NEAR(discriminator_loss(std::vector{0.5}, std::vector{0.5}), 2 * std::numbers::ln2, 1e-15);
  EXPECT_NEAR(discriminator_loss(std::vector{0.8}, std::vector{0.3}), -std::log(0.8) - std::log(0.7), 1e-15);
  EXPECT_LT(discriminator_loss(std::vector{1.0}, std::vector{0.0}), 1e-6);
  EXPECT_THROW(discriminator_loss({}, std::vector{0.5}), Error);
}

TEST(GanLosses, GeneratorExamples) {
  EXPECT_NEAR(generator_loss(std::vector{0.5}), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(generator_loss(std::vector{0.25, 0.75}), -(std::log(0.25) + std::log(0.75)) / 2, 1e-15);
  EXPECT_LT(generator_loss(std::vector{1.0}), 1e-6);
  EXPECT_THROW(generator_loss({}), Error);
}

TEST(OptimalDiscriminator, Examples) {
  for (double p : {1e-6, 0.3, 1.0, 42.0}) EXPECT_EQ(optimal_discriminator(p, p), 0.5);
  EXPECT_EQ(optimal_discriminator(0.7, 0.0), 1.0);
  EXPECT_NEAR(optimal_discriminator(0.2, 0.6), 0.25, 1e-15);
  EXPECT_THROW(optimal_discriminator(0.0, 0.0), Error);
}

TEST(Equilibrium, ValueAtHalf) {
  EXPECT_NEAR(equilibrium_loss_value(), -1.3862943611198906, 1e-15);
  EXPECT_NEAR(minimax_objective(std::vector{0.5}, std::vector{0.5}), equilibrium_loss_value(), 1e-12);
}

double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

// C(G) = max_D V(D, G) on discrete atoms, evaluated through optimal_discriminator.
double max_objective(const std::vector<double>& px, const std::vector<double>& pg) {
  double v = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double d = optimal_discriminator(px[i], pg[i]);
    if (px[i] > 0) v += px[i] * std::log(d);
    if (pg[i] > 0) v += pg[i] * std::log(1.0 - d);
  }
  return v;
}

double js(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl(p, m) + 0.5 * kl(q, m);
}

TEST(Equilibrium, TwoPointJensenShannon) {
  const std::vector<double> px = {1.0, 0.0};
  const std::vector<double> pg = {0.0, 1.0};
  EXPECT_NEAR(js(px, pg), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(max_objective(px, pg), 0.0, 1e-15);
  EXPECT_NEAR(max_objective(px, pg), 2 * js(px, pg) + equilibrium_loss_value(), 1e-15);

  const std::vector<double> qx = {0.3, 0.7};
  const std::vector<double> qg = {0.6, 0.4};
  EXPECT_NEAR(max_objective(qx, qg), 2 * js(qx, qg) + equilibrium_loss_value(), 1e-14);
  EXPECT_NEAR(max_objective(qx, qx), equilibrium_loss_value(), 1e-15);
}

GanConfig small_config() {
  GanConfig c;
  c.latent_dim = 3;
  c.generator_hidden = {6, 5};
  c.discriminator_hidden = {5, 4};
  return c;
}

TEST(GanGradients, MatchFiniteDifferences) {
  Rng rng(11);
  auto model = make_gan(4, small_config(), rng);
  testing::jitter_biases(model.generator, rng);
  testing::jitter_biases(model.discriminator, rng);
  Matrix real(6, 4);
  for (double& v : real.data()) v = rng.normal();
  const Matrix latent = sample_latent(6, 3, rng);

  const auto d = discriminator_gradients(model, real, latent);
  auto d_loss = [&] {
    const Matrix fake = model.generator.forward(latent);
    const Matrix pr = model.discriminator.forward(real);
    const Matrix pf = model.discriminator.forward(fake);
    return discriminator_loss(pr.data(), pf.data());
  };
  EXPECT_NEAR(d.loss, d_loss(), 1e-14);
  const auto rd = testing::check_gradients(model.discriminator.parameter_blocks(), d.discriminator.blocks(), d_loss);
  EXPECT_TRUE(rd.ok()) << rd.first_failure;

  const auto g = generator_gradients(model, latent);
  auto g_loss = [&] {
    return generator_loss(model.discriminator.forward(model.generator.forward(latent)).data());
  };
  EXPECT_NEAR(g.loss, g_loss(), 1e-14);
  const auto rg = testing::check_gradients(model.generator.parameter_blocks(), g.generator.blocks(), g_loss);
  EXPECT_TRUE(rg.ok()) << rg.first_failure;
}

TEST(GanGradients, AccuracyUsesHalfThreshold) {
  Rng rng(1);
  auto model = make_gan(2, small_config(), rng);
  // Zero weights make D output sigmoid(bias); bias 0 gives exactly 0.5.
  for (auto block : model.discriminator.parameter_blocks()) std::fill(block.begin(), block.end(), 0.0);
  const auto d = discriminator_gradients(model, Matrix(3, 2), sample_latent(3, 3, rng));
  EXPECT_EQ(d.accuracy_real, 1.0);
  EXPECT_EQ(d.accuracy_fake, 0.0);
}

TEST(TrainGan, DeterministicAndLogged) {
  Rng rng(3);
  Matrix data(40, 3);
  for (double& v : data.data()) v = rng.normal();
  auto c = small_config();
  c.epochs = 5;
  c.batch_size = 16;
  const auto a = train_gan(data, c);
  const auto b = train_gan(data, c);
  EXPECT_EQ(a.model.generator.forward(Matrix(2, 3, 0.3)), b.model.generator.forward(Matrix(2, 3, 0.3)));
  ASSERT_EQ(a.log.records.size(), 5u);
  for (const auto& r : a.log.records) {
    EXPECT_GE(r.accuracy_real, 0.0);
    EXPECT_LE(r.accuracy_real, 1.0);
    EXPECT_GE(r.discriminator_loss, 0.0);
    EXPECT_GE(r.generator_loss, 0.0);
  }
  c.seed = 99;
  const auto other = train_gan(data, c);
  EXPECT_NE(other.model.generator.forward(Matrix(2, 3, 0.3)), a.model.generator.forward(Matrix(2, 3, 0.3)));
}

TEST(GanGenerate, SeededShapeAndZeroLatent) {
  Rng rng(8);
  const auto model = make_gan(9, GanConfig{}, rng);
  const auto a = gan_generate(model, 500, 7);
  EXPECT_EQ(a.rows(), 500u);
  EXPECT_EQ(a.cols(), 9u);
  EXPECT_TRUE(a.all_finite());
  EXPECT_EQ(a, gan_generate(model, 500, 7));
  EXPECT_THROW(gan_generate(model, 0, 7), UsageError);
  const nn::Vector zero(model.latent_dim, 0.0);
  EXPECT_EQ(model.generator.forward(std::span<const double>(zero)),
            model.generator.forward(std::span<const double>(zero)));
}

TEST(TrainGan, CoversBothModesOfBimodalData) {
  Rng rng(21);
  Matrix data(400, 1);
  for (std::size_t i = 0; i < data.rows(); ++i) data(i, 0) = (i % 2 ? 2.0 : -2.0) + 0.3 * rng.normal();
  GanConfig c;
  c.latent_dim = 2;
  c.epochs = 300;
  const auto r = train_gan(data, c);
  const auto g = gan_generate(r.model, 2000, 5);
  std::size_t left = 0;
  std::size_t right = 0;
  for (double v : g.data()) {
    if (v < 0.0) ++left; else ++right;
  }
  EXPECT_GE(left, 400u) << "left mode share " << left / 2000.0;
  EXPECT_GE(right, 400u) << "right mode share " << right / 2000.0;
}

}  // namespace
}  // namespace tabgen::gan
