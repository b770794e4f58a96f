#include "tabgen/realnvp.hpp"

#include <cmath>

#include "tabgen/adam.hpp"
#include "tabgen/error.hpp"

namespace tabgen::flow {

std::vector<std::size_t> CouplingLayer::pass_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> CouplingLayer::transform_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) out.push_back(i);
  }
  return out;
}

std::vector<bool> alternating_mask(std::size_t dim, std::size_t layer_index) {
  if (dim < 2) throw UsageError("a coupling flow needs at least two dimensions");
  const std::size_t head = (dim + 1) / 2;
  std::vector<bool> mask(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const bool in_head = i < head;
    mask[i] = (layer_index % 2 == 0) ? in_head : !in_head;
  }
  return mask;
}

CouplingLayer make_coupling(std::vector<bool> mask, std::span<const std::size_t> hidden, Rng& rng) {
  CouplingLayer layer;
  layer.mask = std::move(mask);
  const std::size_t d = layer.pass_indices().size();
  const std::size_t rest = layer.dim() - d;
  if (d == 0 || rest == 0) throw UsageError("coupling mask must split the components");

  std::vector<nn::LayerSpec> s_specs;
  std::vector<nn::LayerSpec> t_specs;
  for (auto w : hidden) {
    s_specs.push_back({w, nn::Activation::ReLU});
    t_specs.push_back({w, nn::Activation::ReLU});
  }
  s_specs.push_back({rest, nn::Activation::Tanh});
  t_specs.push_back({rest, nn::Activation::Linear});
  layer.s_net = nn::DenseNetwork::glorot(d, s_specs, rng);
  layer.t_net = nn::DenseNetwork::glorot(d, t_specs, rng);
  return layer;
}

FlowStack make_flow(std::size_t dim, std::size_t n_layers, std::span<const std::size_t> hidden,
                    Rng& rng) {
  if (n_layers == 0) throw UsageError("flow needs at least one layer");
  FlowStack stack;
  for (std::size_t k = 0; k < n_layers; ++k) {
    stack.layers.push_back(make_coupling(alternating_mask(dim, k), hidden, rng));
  }
  return stack;
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite value in ") + what);
  }
}

struct CouplingCache {
  nn::Matrix transformed_input;  // x_b
  nn::Matrix scale;              // s(x_a)
  nn::Tape s_tape;
  nn::Tape t_tape;
};

// Batched normalising pass of one layer. Returns z and adds log-dets into
// `log_det`.
nn::Matrix coupling_forward_batch(const CouplingLayer& layer, const nn::Matrix& x,
                                  std::vector<double>& log_det, CouplingCache* cache) {
  if (x.cols() != layer.dim()) throw DimensionError("flow input has wrong dimension");
  const auto pass = layer.pass_indices();
  const auto trans = layer.transform_indices();
  const nn::Matrix xa = x.columns(pass);
  const nn::Matrix xb = x.columns(trans);

  nn::Matrix s;
  nn::Matrix t;
  if (cache != nullptr) {
    s = layer.s_net.forward(xa, cache->s_tape);
    t = layer.t_net.forward(xa, cache->t_tape);
  } else {
    s = layer.s_net.forward(xa);
    t = layer.t_net.forward(xa);
  }

  nn::Matrix z = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double ld = 0.0;
    for (std::size_t j = 0; j < trans.size(); ++j) {
      z(i, trans[j]) = xb(i, j) * std::exp(s(i, j)) + t(i, j);
      ld += s(i, j);
    }
    log_det[i] += ld;
  }
  require_finite(z.data(), "coupling forward");
  if (cache != nullptr) {
    cache->transformed_input = xb;
    cache->scale = std::move(s);
  }
  return z;
}

nn::Matrix coupling_inverse_batch(const CouplingLayer& layer, const nn::Matrix& z) {
  if (z.cols() != layer.dim()) throw DimensionError("flow input has wrong dimension");
  const auto pass = layer.pass_indices();
  const auto trans = layer.transform_indices();
  const nn::Matrix za = z.columns(pass);
  const nn::Matrix s = layer.s_net.forward(za);
  const nn::Matrix t = layer.t_net.forward(za);
  nn::Matrix x = z;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < trans.size(); ++j) {
      x(i, trans[j]) = (z(i, trans[j]) - t(i, j)) * std::exp(-s(i, j));
    }
  }
  require_finite(x.data(), "coupling inverse");
  return x;
}

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // ln(2 pi)

}  // namespace

FlowOutput coupling_forward(const CouplingLayer& layer, std::span<const double> x) {
  std::vector<double> ld(1, 0.0);
  const nn::Matrix z = coupling_forward_batch(layer, nn::Matrix::row_vector(x), ld, nullptr);
  return {nn::Vector(z.data().begin(), z.data().end()), ld[0]};
}

nn::Vector coupling_inverse(const CouplingLayer& layer, std::span<const double> z) {
  const nn::Matrix x = coupling_inverse_batch(layer, nn::Matrix::row_vector(z));
  return nn::Vector(x.data().begin(), x.data().end());
}

FlowOutput flow_forward(const FlowStack& stack, std::span<const double> x) {
  std::vector<double> ld(1, 0.0);
  nn::Matrix current = nn::Matrix::row_vector(x);
  for (const auto& layer : stack.layers) current = coupling_forward_batch(layer, current, ld, nullptr);
  return {nn::Vector(current.data().begin(), current.data().end()), ld[0]};
}

nn::Vector flow_inverse(const FlowStack& stack, std::span<const double> z) {
  nn::Matrix current = nn::Matrix::row_vector(z);
  for (auto it = stack.layers.rbegin(); it != stack.layers.rend(); ++it) {
    current = coupling_inverse_batch(*it, current);
  }
  return nn::Vector(current.data().begin(), current.data().end());
}

double standard_normal_log_density(std::span<const double> z) {
  double sq = 0.0;
  for (double v : z) sq += v * v;
  return -0.5 * sq - 0.5 * static_cast<double>(z.size()) * kLogTwoPi;
}

double flow_log_likelihood(const FlowStack& stack, std::span<const double> x) {
  require_finite(x, "flow input");
  const auto out = flow_forward(stack, x);
  const double value = standard_normal_log_density(out.z) + out.log_det;
  if (!std::isfinite(value)) throw NumericalError("non-finite log-likelihood");
  return value;
}

NllGradients nll_gradients(const FlowStack& stack, const nn::Matrix& batch) {
  if (batch.rows() == 0) throw Error("log-likelihood of an empty batch");
  const std::size_t n = batch.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<CouplingCache> caches(stack.layers.size());
  std::vector<double> log_det(n, 0.0);
  nn::Matrix current = batch;
  for (std::size_t k = 0; k < stack.layers.size(); ++k) {
    current = coupling_forward_batch(stack.layers[k], current, log_det, &caches[k]);
  }

  NllGradients out;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += standard_normal_log_density(current.row(i)) + log_det[i];
  }
  out.loss = -total * inv_n;
  if (!std::isfinite(out.loss)) throw NumericalError("non-finite negative log-likelihood");

  // d(loss)/dz for the base term is z / n; every log-det enters with -1/n.
  nn::Matrix grad = current;
  for (double& v : grad.data()) v *= inv_n;
  const double grad_log_det = -inv_n;

  out.layers.resize(stack.layers.size());
  for (std::size_t k = stack.layers.size(); k-- > 0;) {
    const auto& layer = stack.layers[k];
    const auto& cache = caches[k];
    const auto pass = layer.pass_indices();
    const auto trans = layer.transform_indices();

    nn::Matrix grad_s(n, trans.size());
    nn::Matrix grad_t(n, trans.size());
    nn::Matrix grad_x = grad;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < trans.size(); ++j) {
        const double gz = grad(i, trans[j]);
        const double scale = std::exp(cache.scale(i, j));
        grad_x(i, trans[j]) = gz * scale;
        grad_s(i, j) = gz * cache.transformed_input(i, j) * scale + grad_log_det;
        grad_t(i, j) = gz;
      }
    }
    auto s_back = layer.s_net.backward(cache.s_tape, grad_s);
    auto t_back = layer.t_net.backward(cache.t_tape, grad_t);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < pass.size(); ++j) {
        grad_x(i, pass[j]) += s_back.input(i, j) + t_back.input(i, j);
      }
    }
    out.layers[k] = {std::move(s_back.parameters), std::move(t_back.parameters)};
    grad = std::move(grad_x);
  }
  return out;
}

NfTrainResult train_nf(const nn::Matrix& data, const NfConfig& config) {
  if (data.rows() == 0) throw UsageError("flow training data is empty");
  if (config.epochs == 0) throw UsageError("flow epochs must be positive");
  Rng master(config.seed);
  Rng init_rng(master.split());
  Rng noise_rng(master.split());
  if (config.noise_std < 0.0) throw UsageError("flow noise_std must be nonnegative");

  NfTrainResult result;
  result.stack = make_flow(data.cols(), config.layers, config.hidden, init_rng);
  auto& stack = result.stack;

  std::vector<nn::Adam> s_opt;
  std::vector<nn::Adam> t_opt;
  for (const auto& layer : stack.layers) {
    s_opt.emplace_back(layer.s_net, nn::AdamOptions{.learning_rate = config.learning_rate});
    t_opt.emplace_back(layer.t_net, nn::AdamOptions{.learning_rate = config.learning_rate});
  }

  result.mean_log_likelihood.reserve(config.epochs + 1);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    nn::Matrix batch = data;
    if (config.noise_std > 0.0) {
      for (double& v : batch.data()) v += config.noise_std * noise_rng.normal();
    }
    NllGradients grads;
    try {
      grads = nll_gradients(stack, batch);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at epoch " + std::to_string(epoch), epoch);
    }
    result.mean_log_likelihood.push_back(-grads.loss);
    for (std::size_t k = 0; k < stack.layers.size(); ++k) {
      s_opt[k].step(stack.layers[k].s_net, grads.layers[k].s_net);
      t_opt[k].step(stack.layers[k].t_net, grads.layers[k].t_net);
    }
  }
  result.mean_log_likelihood.push_back(-nll_gradients(stack, data).loss);
  return result;
}

nn::Matrix nf_generate(const FlowStack& stack, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UsageError("number of samples to generate must be positive");
  Rng rng(seed);
  nn::Matrix current(n, stack.dim());
  for (double& v : current.data()) v = rng.normal();
  for (auto it = stack.layers.rbegin(); it != stack.layers.rend(); ++it) {
    current = coupling_inverse_batch(*it, current);
  }
  return current;
}

}  // namespace tabgen::flow
