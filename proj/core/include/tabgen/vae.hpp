#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tabgen/matrix.hpp"
#include "tabgen/network.hpp"
#include "tabgen/random.hpp"

namespace tabgen::vae {

struct VaeConfig {
  std::size_t epochs = 3000;
  std::size_t batch_size = 30;
  std::size_t latent_dim = 4;
  std::vector<std::size_t> hidden = {64, 64, 64};
  double dropout = 0.1;
  bool batch_norm = true;
  double kl_weight = 1.0;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
};

/// Gaussian encoder emitting [mu, logvar] and a deterministic decoder.
struct VaeModel {
  nn::DenseNetwork encoder;  // data -> 2 * latent
  nn::DenseNetwork decoder;  // latent -> data
  std::size_t latent_dim = 0;

  std::size_t data_dim() const { return decoder.outputs(); }
};

VaeModel make_vae(std::size_t data_dim, const VaeConfig& config, Rng& rng);

struct Encoding {
  nn::Vector mu;
  nn::Vector logvar;
};

/// Inference-mode encoder pass split into mean and log-variance halves.
Encoding encode(const VaeModel& model, std::span<const double> x);
nn::Vector decode(const VaeModel& model, std::span<const double> z);

/// z = mu + exp(logvar / 2) * eps.
nn::Vector reparameterize(std::span<const double> mu, std::span<const double> logvar,
                          std::span<const double> eps);

/// KL(N(mu, diag(exp(logvar))) || N(0, I)) in closed form.
double kl_standard_normal(std::span<const double> mu, std::span<const double> logvar);

struct ElboTerms {
  double total = 0.0;
  double reconstruction = 0.0;  // squared error
  double kl = 0.0;
};

/// Negative ELBO for one sample with the noise draw fixed, inference mode.
ElboTerms elbo_loss(const VaeModel& model, std::span<const double> x, std::span<const double> eps,
                    double kl_weight = 1.0);

struct ElboGradients {
  ElboTerms terms;  // batch means
  nn::ParameterGradients encoder;
  nn::ParameterGradients decoder;
};

/// Batch-mean loss and parameter gradients. With `dropout_rng` set the pass
/// runs in training mode (batch statistics, dropout, running-stat updates);
/// otherwise in inference mode.
ElboGradients elbo_gradients(VaeModel& model, const nn::Matrix& batch, const nn::Matrix& eps,
                             double kl_weight, Rng* dropout_rng);

struct TrainHistory {
  /// Inference-mode loss over the whole training set with one fixed noise
  /// draw, before and after training.
  ElboTerms initial;
  ElboTerms final;
  /// Mean training-mode loss per epoch.
  std::vector<ElboTerms> epochs;
};

struct VaeTrainResult {
  VaeModel model;
  TrainHistory history;
};

/// Minibatch Adam on the mean negative ELBO. Throws NumericalError carrying
/// the epoch on a non-finite loss.
VaeTrainResult train_vae(const nn::Matrix& data, const VaeConfig& config);

/// Decoder applied to n standard normal latents, inference mode.
nn::Matrix vae_generate(const VaeModel& model, std::size_t n, std::uint64_t seed);

}  // namespace tabgen::vae
