#pragma once

// Shared machinery of the VAE and CVAE. A condition matrix with zero columns
// gives the unconditional model; otherwise the condition is appended as the
// last input columns of both encoder and decoder.

#include <functional>

#include "tabgen/vae.hpp"

namespace tabgen::vae::detail {

struct Networks {
  nn::DenseNetwork& encoder;
  nn::DenseNetwork& decoder;
  std::size_t latent_dim;
};

struct ConstNetworks {
  const nn::DenseNetwork& encoder;
  const nn::DenseNetwork& decoder;
  std::size_t latent_dim;
};

void build(nn::DenseNetwork& encoder, nn::DenseNetwork& decoder, std::size_t data_dim,
           std::size_t condition_dim, const VaeConfig& config, Rng& rng);

ElboTerms evaluate(ConstNetworks nets, const nn::Matrix& x, const nn::Matrix& condition,
                   const nn::Matrix& eps, double kl_weight);

ElboGradients gradients(Networks nets, const nn::Matrix& x, const nn::Matrix& condition,
                        const nn::Matrix& eps, double kl_weight, Rng* dropout_rng);

/// `condition_of(batch)` yields the condition columns for a data batch.
TrainHistory train(Networks nets, const nn::Matrix& data, const VaeConfig& config,
                   const std::function<nn::Matrix(const nn::Matrix&)>& condition_of,
                   Rng& master);

nn::Matrix decode_batch(const nn::DenseNetwork& decoder, const nn::Matrix& z,
                        const nn::Matrix& condition);

void validate_config(const VaeConfig& config);

}  // namespace tabgen::vae::detail
