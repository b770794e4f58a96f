#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tabgen/standardizer.hpp"
#include "tabgen/vae.hpp"

namespace tabgen::cvae {

/// Same hyperparameters and defaults as the unconditional model.
using CvaeConfig = vae::VaeConfig;

/// VAE whose encoder and decoder both receive one sample component (the
/// label) as an extra trailing input.
struct CvaeModel {
  nn::DenseNetwork encoder;  // data + label -> 2 * latent
  nn::DenseNetwork decoder;  // latent + label -> data
  std::size_t latent_dim = 0;
  std::size_t label_index = 0;  // P1008 by default

  std::size_t data_dim() const { return decoder.outputs(); }
};

CvaeModel make_cvae(std::size_t data_dim, const CvaeConfig& config, std::size_t label_index,
                    Rng& rng);

/// Negative conditional ELBO for one sample; `label` is the standardized
/// label value. Inference mode.
vae::ElboTerms cvae_loss(const CvaeModel& model, std::span<const double> x, double label,
                         std::span<const double> eps, double kl_weight = 1.0);

/// Batch gradients; labels are taken from column `label_index` of `batch`.
vae::ElboGradients cvae_gradients(CvaeModel& model, const nn::Matrix& batch,
                                  const nn::Matrix& eps, double kl_weight, Rng* dropout_rng);

struct CvaeTrainResult {
  CvaeModel model;
  vae::TrainHistory history;
};

CvaeTrainResult train_cvae(const nn::Matrix& data, const CvaeConfig& config,
                           std::size_t label_index = 0);

/// One standardized sample per standardized label value.
nn::Matrix cvae_generate_standardized(const CvaeModel& model, std::span<const double> labels,
                                      std::uint64_t seed);

/// One standardized sample per raw label value; labels are standardized with
/// the statistics of the label column.
nn::Matrix cvae_generate(const CvaeModel& model, std::span<const double> raw_labels,
                         std::uint64_t seed, const data::Standardizer& standardizer);

/// Raw labels drawn uniformly on the open training domain (0, 5).
std::vector<double> uniform_labels(std::size_t n, std::uint64_t seed);

}  // namespace tabgen::cvae
