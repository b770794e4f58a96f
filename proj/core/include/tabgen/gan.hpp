#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "tabgen/matrix.hpp"
#include "tabgen/network.hpp"
#include "tabgen/random.hpp"

namespace tabgen::gan {

struct GanConfig {
  std::size_t epochs = 30000;
  std::size_t batch_size = 32;
  std::size_t latent_dim = 5;
  std::vector<std::size_t> generator_hidden = {32, 32};
  std::vector<std::size_t> discriminator_hidden = {32, 32};
  double generator_learning_rate = 1e-3;
  double discriminator_learning_rate = 1e-3;
  /// Std of Gaussian noise added to every discriminator input (real and
  /// generated) during training. Zero disables it.
  double instance_noise = 0.5;
  std::uint64_t seed = 42;
};

/// Generator (latent -> data, ReLU hidden, linear head) and discriminator
/// (data -> probability, ReLU hidden, sigmoid head). The latent prior is the
/// standard normal.
struct GanModel {
  nn::DenseNetwork generator;
  nn::DenseNetwork discriminator;
  std::size_t latent_dim = 0;

  std::size_t data_dim() const { return generator.outputs(); }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double generator_loss = 0.0;
  double discriminator_loss = 0.0;
  double accuracy_real = 0.0;
  double accuracy_fake = 0.0;
};

struct TrainingLog {
  std::vector<EpochRecord> records;

  /// Mean of (accuracy_real + accuracy_fake) / 2 over the last `n` records.
  double mean_accuracy_last(std::size_t n) const;
};

GanModel make_gan(std::size_t data_dim, const GanConfig& config, Rng& rng);

/// -[mean ln D(x) + mean ln(1 - D(G(z)))], probabilities clamped.
double discriminator_loss(std::span<const double> d_real, std::span<const double> d_fake);

/// Non-saturating generator loss -mean ln D(G(z)).
double generator_loss(std::span<const double> d_fake);

/// Value of the two-player objective, mean ln D(x) + mean ln(1 - D(G(z))).
double minimax_objective(std::span<const double> d_real, std::span<const double> d_fake);

/// Discriminator that is optimal for a fixed generator: p_x / (p_x + p_g).
double optimal_discriminator(double p_x, double p_g);

/// Objective value once the generator matches the data (JS divergence 0).
constexpr double equilibrium_loss_value() { return -2.0 * std::numbers::ln2; }

struct DiscriminatorGradients {
  double loss = 0.0;
  double accuracy_real = 0.0;
  double accuracy_fake = 0.0;
  nn::ParameterGradients discriminator;
};

struct GeneratorGradients {
  double loss = 0.0;
  nn::ParameterGradients generator;
};

/// Loss and gradient of discriminator_loss on a real batch and a batch of
/// latent codes; the generator is held fixed.
DiscriminatorGradients discriminator_gradients(const GanModel& model, const nn::Matrix& real,
                                               const nn::Matrix& latent);
/// Same, for already generated samples.
DiscriminatorGradients discriminator_gradients_on(const GanModel& model, const nn::Matrix& real,
                                                  const nn::Matrix& fake);

/// Loss and gradient of generator_loss; the discriminator is held fixed.
/// `input_noise`, if given, is added to the generated batch before the
/// discriminator sees it.
GeneratorGradients generator_gradients(const GanModel& model, const nn::Matrix& latent,
                                       const nn::Matrix* input_noise = nullptr);

struct GanTrainResult {
  GanModel model;
  TrainingLog log;
};

/// Alternating updates, one discriminator step then one generator step per
/// minibatch. An epoch is one shuffled pass over `data`. Throws
/// NumericalError carrying the epoch if either loss becomes non-finite.
GanTrainResult train_gan(const nn::Matrix& data, const GanConfig& config);

/// Standard-normal latent batch.
nn::Matrix sample_latent(std::size_t n, std::size_t latent_dim, Rng& rng);

/// Generator applied to n i.i.d. standard normal latents.
nn::Matrix gan_generate(const GanModel& model, std::size_t n, std::uint64_t seed);

}  // namespace tabgen::gan
