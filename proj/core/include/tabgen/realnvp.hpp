#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tabgen/matrix.hpp"
#include "tabgen/network.hpp"
#include "tabgen/random.hpp"

namespace tabgen::flow {

/// Affine coupling bijection. Components with mask == true pass through; the
/// remaining block is scaled by exp(s(x_pass)) and shifted by t(x_pass).
/// The s network ends in tanh so each scale factor stays within e^{+-1}.
struct CouplingLayer {
  std::vector<bool> mask;
  nn::DenseNetwork s_net;
  nn::DenseNetwork t_net;

  std::size_t dim() const { return mask.size(); }
  std::vector<std::size_t> pass_indices() const;
  std::vector<std::size_t> transform_indices() const;
};

/// Coupling layers applied in order in the normalising direction (data to
/// latent), with a standard normal base distribution.
struct FlowStack {
  std::vector<CouplingLayer> layers;

  std::size_t dim() const { return layers.empty() ? 0 : layers.front().dim(); }
};

struct NfConfig {
  std::size_t epochs = 5000;
  std::size_t layers = 5;
  std::vector<std::size_t> hidden = {32, 32};
  double learning_rate = 1e-3;
  /// Std of fresh Gaussian noise added to the (standardized) training batch
  /// every epoch. Keeps the likelihood bounded when some columns are exact
  /// functions of others.
  double noise_std = 0.05;
  std::uint64_t seed = 42;
};

/// Even layers pass the first ceil(D/2) components, odd layers the rest.
std::vector<bool> alternating_mask(std::size_t dim, std::size_t layer_index);

CouplingLayer make_coupling(std::vector<bool> mask, std::span<const std::size_t> hidden, Rng& rng);
FlowStack make_flow(std::size_t dim, std::size_t n_layers, std::span<const std::size_t> hidden,
                    Rng& rng);

struct FlowOutput {
  nn::Vector z;
  double log_det = 0.0;
};

/// Normalising direction. log_det is the sum of the scale outputs.
FlowOutput coupling_forward(const CouplingLayer& layer, std::span<const double> x);
/// Exact inverse of coupling_forward.
nn::Vector coupling_inverse(const CouplingLayer& layer, std::span<const double> z);

FlowOutput flow_forward(const FlowStack& stack, std::span<const double> x);
nn::Vector flow_inverse(const FlowStack& stack, std::span<const double> z);

double standard_normal_log_density(std::span<const double> z);

/// log p_Z(f(x)) + sum of per-layer log-determinants.
double flow_log_likelihood(const FlowStack& stack, std::span<const double> x);

struct CouplingGradients {
  nn::ParameterGradients s_net;
  nn::ParameterGradients t_net;
};

struct NllGradients {
  double loss = 0.0;  // negative mean log-likelihood of the batch
  std::vector<CouplingGradients> layers;
};

NllGradients nll_gradients(const FlowStack& stack, const nn::Matrix& batch);

struct NfTrainResult {
  FlowStack stack;
  /// Mean training log-likelihood before each epoch's update, followed by the
  /// value after the final update (epochs + 1 entries).
  std::vector<double> mean_log_likelihood;
};

/// Full-batch Adam ascent on the mean log-likelihood. Throws NumericalError
/// carrying the epoch if the loss becomes non-finite.
NfTrainResult train_nf(const nn::Matrix& data, const NfConfig& config);

/// Base-distribution draws pushed through the inverse layers in reverse order.
nn::Matrix nf_generate(const FlowStack& stack, std::size_t n, std::uint64_t seed);

}  // namespace tabgen::flow
