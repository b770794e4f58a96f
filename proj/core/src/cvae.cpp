#include "tabgen/cvae.hpp"

#include <cmath>

#include "tabgen/error.hpp"
#include "variational.hpp"

namespace tabgen::cvae {

namespace {

nn::Matrix label_column(const nn::Matrix& batch, std::size_t label_index) {
  if (label_index >= batch.cols()) throw DimensionError("label index outside the sample");
  return batch.columns(label_index, 1);
}

}  // namespace

CvaeModel make_cvae(std::size_t data_dim, const CvaeConfig& config, std::size_t label_index,
                    Rng& rng) {
  if (label_index >= data_dim) throw UsageError("label index outside the sample");
  CvaeModel model;
  model.latent_dim = config.latent_dim;
  model.label_index = label_index;
  vae::detail::build(model.encoder, model.decoder, data_dim, 1, config, rng);
  return model;
}

vae::ElboTerms cvae_loss(const CvaeModel& model, std::span<const double> x, double label,
                         std::span<const double> eps, double kl_weight) {
  if (!std::isfinite(label)) throw NumericalError("non-finite label");
  return vae::detail::evaluate({model.encoder, model.decoder, model.latent_dim},
                               nn::Matrix::row_vector(x), nn::Matrix(1, 1, label),
                               nn::Matrix::row_vector(eps), kl_weight);
}

vae::ElboGradients cvae_gradients(CvaeModel& model, const nn::Matrix& batch,
                                  const nn::Matrix& eps, double kl_weight, Rng* dropout_rng) {
  return vae::detail::gradients({model.encoder, model.decoder, model.latent_dim}, batch,
                                label_column(batch, model.label_index), eps, kl_weight,
                                dropout_rng);
}

CvaeTrainResult train_cvae(const nn::Matrix& data, const CvaeConfig& config,
                           std::size_t label_index) {
  Rng master(config.seed);
  Rng init_rng(master.split());
  CvaeTrainResult result;
  result.model = make_cvae(data.cols(), config, label_index, init_rng);
  result.history = vae::detail::train(
      {result.model.encoder, result.model.decoder, result.model.latent_dim}, data, config,
      [label_index](const nn::Matrix& batch) { return label_column(batch, label_index); },
      master);
  return result;
}

nn::Matrix cvae_generate_standardized(const CvaeModel& model, std::span<const double> labels,
                                      std::uint64_t seed) {
  if (labels.empty()) throw UsageError("label list is empty");
  Rng rng(seed);
  nn::Matrix z(labels.size(), model.latent_dim);
  for (double& v : z.data()) v = rng.normal();
  nn::Matrix condition(labels.size(), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(labels[i])) throw NumericalError("non-finite label");
    condition(i, 0) = labels[i];
  }
  return vae::detail::decode_batch(model.decoder, z, condition);
}

nn::Matrix cvae_generate(const CvaeModel& model, std::span<const double> raw_labels,
                         std::uint64_t seed, const data::Standardizer& standardizer) {
  std::vector<double> labels(raw_labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = standardizer.standardize_component(model.label_index, raw_labels[i]);
  }
  return cvae_generate_standardized(model, labels, seed);
}

std::vector<double> uniform_labels(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> labels;
  labels.reserve(n);
  while (labels.size() < n) {
    const double v = rng.uniform(data::kDomainLow, data::kDomainHigh);
    if (v > data::kDomainLow) labels.push_back(v);
  }
  return labels;
}

}  // namespace tabgen::cvae
