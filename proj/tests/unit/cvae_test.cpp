#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "tabgen/cvae.hpp"
#include "tabgen/error.hpp"

namespace tabgen::cvae {
namespace {

using nn::Matrix;
using nn::Vector;

CvaeConfig small_config(bool batch_norm = false, double dropout = 0.0) {
  CvaeConfig c;
  c.latent_dim = 3;
  c.hidden = {6, 5, 4};
  c.batch_norm = batch_norm;
  c.dropout = dropout;
  return c;
}

// Copies `from` into the first columns of the first layer of `to` and zeroes
// the trailing label column.
void embed(const nn::DenseNetwork& from, nn::DenseNetwork& to) {
  ASSERT_EQ(from.depth(), to.depth());
  for (std::size_t k = 0; k < from.depth(); ++k) {
    const auto& src = from.layer(k);
    auto& dst = to.layer(k);
    dst.bias = src.bias;
    dst.norm = src.norm;
    for (std::size_t r = 0; r < dst.weights.rows(); ++r) {
      for (std::size_t c = 0; c < dst.weights.cols(); ++c) {
        dst.weights(r, c) = c < src.weights.cols() ? src.weights(r, c) : 0.0;
      }
    }
  }
}

TEST(Cvae, ZeroLabelWeightsReduceToVae) {
  Rng rng(1);
  const auto base = vae::make_vae(9, small_config(true), rng);
  auto model = make_cvae(9, small_config(true), 0, rng);
  embed(base.encoder, model.encoder);
  embed(base.decoder, model.decoder);
  Vector x(9);
  for (double& v : x) v = rng.normal();
  const Vector eps = {0.4, -1.2, 0.1};
  for (double label : {-1.5, 0.0, 2.0}) {
    const auto c = cvae_loss(model, x, label, eps, 0.6);
    const auto v = vae::elbo_loss(base, x, eps, 0.6);
    EXPECT_EQ(c.total, v.total);
    EXPECT_EQ(c.reconstruction, v.reconstruction);
    EXPECT_EQ(c.kl, v.kl);
  }
}

TEST(Cvae, InputWidthsIncludeLabel) {
  Rng rng(2);
  const auto model = make_cvae(9, small_config(), 0, rng);
  EXPECT_EQ(model.encoder.inputs(), 10u);
  EXPECT_EQ(model.encoder.outputs(), 6u);
  EXPECT_EQ(model.decoder.inputs(), 4u);
  EXPECT_EQ(model.decoder.outputs(), 9u);
  EXPECT_THROW(make_cvae(9, small_config(), 9, rng), UsageError);
}

TEST(Cvae, LossIsAdditive) {
  Rng rng(3);
  const auto model = make_cvae(9, small_config(true, 0.1), 0, rng);
  Vector x(9);
  for (double& v : x) v = rng.normal();
  const auto t = cvae_loss(model, x, x[0], Vector{0.1, 0.2, 0.3}, 0.25);
  EXPECT_EQ(t.total, t.reconstruction + 0.25 * t.kl);
  EXPECT_GE(t.kl, 0.0);
}

void gradient_check(bool batch_norm, double dropout, bool train_mode) {
  Rng rng(4);
  auto model = make_cvae(5, small_config(batch_norm, dropout), 2, rng);
  testing::jitter_biases(model.encoder, rng);
  testing::jitter_biases(model.decoder, rng);
  Matrix batch(6, 5), eps(6, 3);
  for (double& v : batch.data()) v = rng.normal();
  for (double& v : eps.data()) v = rng.normal();
  const Rng dropout_seed(rng.split());
  auto run = [&] {
    CvaeModel copy = model;
    Rng r = dropout_seed;
    return cvae_gradients(copy, batch, eps, 1.0, train_mode ? &r : nullptr);
  };
  const auto g = run();
  auto loss = [&] { return run().terms.total; };
  auto result = testing::check_gradients(model.encoder.parameter_blocks(), g.encoder.blocks(), loss);
  result += testing::check_gradients(model.decoder.parameter_blocks(), g.decoder.blocks(), loss);
  EXPECT_TRUE(result.ok()) << result.failures << " failures; " << result.first_failure;

  if (!train_mode) {
    double mean = 0.0;
    for (std::size_t i = 0; i < batch.rows(); ++i) {
      mean += cvae_loss(model, batch.row(i), batch(i, 2), eps.row(i)).total / 6.0;
    }
    EXPECT_NEAR(g.terms.total, mean, 1e-12);
  }
}

TEST(CvaeGradients, InferenceMode) { gradient_check(true, 0.1, false); }
TEST(CvaeGradients, TrainingMode) { gradient_check(true, 0.1, true); }
TEST(CvaeGradients, PlainNetworks) { gradient_check(false, 0.0, true); }

TEST(TrainCvae, DeterministicWithVaeDefaults) {
  const CvaeConfig defaults;
  const vae::VaeConfig vae_defaults;
  EXPECT_EQ(defaults.epochs, vae_defaults.epochs);
  EXPECT_EQ(defaults.hidden, vae_defaults.hidden);
  EXPECT_EQ(defaults.latent_dim, vae_defaults.latent_dim);

  Rng rng(5);
  Matrix data(40, 4);
  for (double& v : data.data()) v = rng.normal();
  auto c = small_config(true, 0.1);
  c.epochs = 8;
  c.batch_size = 10;
  const auto a = train_cvae(data, c, 1);
  const auto b = train_cvae(data, c, 1);
  EXPECT_EQ(a.model.label_index, 1u);
  const Vector labels = {-1.0, 0.0, 1.0};
  EXPECT_EQ(cvae_generate_standardized(a.model, labels, 9), cvae_generate_standardized(b.model, labels, 9));
  EXPECT_EQ(a.history.epochs.size(), 8u);
}

TEST(CvaeGenerate, LabelsAndSeeds) {
  Rng rng(6);
  const auto model = make_cvae(9, CvaeConfig{}, 0, rng);
  const Vector labels = {0.5, 0.5, -0.5};
  const auto a = cvae_generate_standardized(model, labels, 11);
  EXPECT_EQ(a.rows(), 3u);
  EXPECT_EQ(a.cols(), 9u);
  EXPECT_EQ(a, cvae_generate_standardized(model, labels, 11));
  EXPECT_NE(a, cvae_generate_standardized(model, labels, 12));
  EXPECT_THROW(cvae_generate_standardized(model, {}, 11), UsageError);
}

TEST(UniformLabels, OpenUnitDomain) {
  const auto l = uniform_labels(1000, 3);
  EXPECT_EQ(l, uniform_labels(1000, 3));
  for (double v : l) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 5.0);
  }
}

}  // namespace
}  // namespace tabgen::cvae
