#include "tabgen/vae.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabgen/adam.hpp"
#include "tabgen/error.hpp"
#include "tabgen/loss.hpp"
#include "variational.hpp"

namespace tabgen::vae {

namespace detail {

void validate_config(const VaeConfig& config) {
  if (config.epochs == 0 || config.batch_size == 0 || config.latent_dim == 0) {
    throw UsageError("VAE epochs, batch size and latent dimension must be positive");
  }
  if (config.dropout < 0.0 || config.dropout >= 1.0) throw UsageError("dropout must lie in [0, 1)");
  if (config.kl_weight < 0.0) throw UsageError("kl_weight must be nonnegative");
}

void build(nn::DenseNetwork& encoder, nn::DenseNetwork& decoder, std::size_t data_dim,
           std::size_t condition_dim, const VaeConfig& config, Rng& rng) {
  validate_config(config);
  std::vector<nn::LayerSpec> enc_specs;
  std::vector<nn::LayerSpec> dec_specs;
  for (auto w : config.hidden) {
    const nn::LayerSpec hidden{w, nn::Activation::ReLU, config.batch_norm, config.dropout};
    enc_specs.push_back(hidden);
    dec_specs.push_back(hidden);
  }
  enc_specs.push_back({2 * config.latent_dim, nn::Activation::Linear});
  dec_specs.push_back({data_dim, nn::Activation::Linear});
  encoder = nn::DenseNetwork::glorot(data_dim + condition_dim, enc_specs, rng);
  decoder = nn::DenseNetwork::glorot(config.latent_dim + condition_dim, dec_specs, rng);
}

namespace {

struct Forward {
  nn::Matrix mu;
  nn::Matrix logvar;
  nn::Matrix z;
  nn::Matrix reconstruction;
  ElboTerms terms;
};

void split_encoding(const nn::Matrix& enc_out, std::size_t latent, nn::Matrix& mu,
                    nn::Matrix& logvar) {
  if (enc_out.cols() != 2 * latent) throw DimensionError("encoder output must be 2 x latent_dim");
  mu = enc_out.columns(0, latent);
  logvar = enc_out.columns(latent, latent);
}

nn::Matrix reparameterize_batch(const nn::Matrix& mu, const nn::Matrix& logvar,
                                const nn::Matrix& eps) {
  if (eps.rows() != mu.rows() || eps.cols() != mu.cols()) {
    throw DimensionError("noise shape does not match latent shape");
  }
  nn::Matrix z(mu.rows(), mu.cols());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z.data()[i] = mu.data()[i] + std::exp(0.5 * logvar.data()[i]) * eps.data()[i];
  }
  return z;
}

ElboTerms batch_terms(const nn::Matrix& x, const Forward& f, double kl_weight) {
  ElboTerms t;
  const std::size_t n = x.rows();
  for (std::size_t i = 0; i < n; ++i) {
    t.reconstruction += [&] {
      double r = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double d = f.reconstruction(i, j) - x(i, j);
        r += d * d;
      }
      return r;
    }();
    t.kl += kl_standard_normal(f.mu.row(i), f.logvar.row(i));
  }
  t.reconstruction /= static_cast<double>(n);
  t.kl /= static_cast<double>(n);
  t.total = t.reconstruction + kl_weight * t.kl;
  if (!std::isfinite(t.total)) throw NumericalError("non-finite ELBO");
  return t;
}

}  // namespace

ElboTerms evaluate(ConstNetworks nets, const nn::Matrix& x, const nn::Matrix& condition,
                   const nn::Matrix& eps, double kl_weight) {
  if (!x.all_finite()) throw NumericalError("non-finite VAE input");
  Forward f;
  split_encoding(nets.encoder.forward(x.hconcat(condition)), nets.latent_dim, f.mu, f.logvar);
  f.z = reparameterize_batch(f.mu, f.logvar, eps);
  f.reconstruction = nets.decoder.forward(f.z.hconcat(condition));
  if (f.reconstruction.cols() != x.cols()) throw DimensionError("decoder output arity mismatch");
  return batch_terms(x, f, kl_weight);
}

ElboGradients gradients(Networks nets, const nn::Matrix& x, const nn::Matrix& condition,
                        const nn::Matrix& eps, double kl_weight, Rng* dropout_rng) {
  if (!x.all_finite()) throw NumericalError("non-finite VAE input");
  const std::size_t n = x.rows();
  const std::size_t latent = nets.latent_dim;
  nn::Tape enc_tape;
  nn::Tape dec_tape;

  Forward f;
  const nn::Matrix enc_in = x.hconcat(condition);
  split_encoding(dropout_rng ? nets.encoder.forward_train(enc_in, enc_tape, *dropout_rng)
                             : nets.encoder.forward(enc_in, enc_tape),
                 latent, f.mu, f.logvar);
  f.z = reparameterize_batch(f.mu, f.logvar, eps);
  const nn::Matrix dec_in = f.z.hconcat(condition);
  f.reconstruction = dropout_rng ? nets.decoder.forward_train(dec_in, dec_tape, *dropout_rng)
                                 : nets.decoder.forward(dec_in, dec_tape);
  if (f.reconstruction.cols() != x.cols()) throw DimensionError("decoder output arity mismatch");

  ElboGradients out;
  out.terms = batch_terms(x, f, kl_weight);

  const auto recon = nn::mean_squared_error_sum(f.reconstruction, x);
  auto dec_back = nets.decoder.backward(dec_tape, recon.gradient);

  const double inv_n = 1.0 / static_cast<double>(n);
  nn::Matrix enc_grad(n, 2 * latent);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < latent; ++j) {
      const double gz = dec_back.input(i, j);
      const double mu = f.mu(i, j);
      const double lv = f.logvar(i, j);
      const double sd = std::exp(0.5 * lv);
      enc_grad(i, j) = gz + kl_weight * mu * inv_n;
      enc_grad(i, latent + j) =
          gz * eps(i, j) * 0.5 * sd + kl_weight * 0.5 * (std::exp(lv) - 1.0) * inv_n;
    }
  }
  out.encoder = nets.encoder.backward(enc_tape, enc_grad).parameters;
  out.decoder = std::move(dec_back.parameters);
  return out;
}

TrainHistory train(Networks nets, const nn::Matrix& data, const VaeConfig& config,
                   const std::function<nn::Matrix(const nn::Matrix&)>& condition_of,
                   Rng& master) {
  if (data.rows() == 0) throw UsageError("VAE training data is empty");
  validate_config(config);
  Rng shuffle_rng(master.split());
  Rng noise_rng(master.split());
  Rng dropout_rng(master.split());
  Rng probe_rng(master.split());

  const std::size_t latent = nets.latent_dim;
  nn::Matrix probe_eps(data.rows(), latent);
  for (double& v : probe_eps.data()) v = probe_rng.normal();
  const nn::Matrix full_condition = condition_of(data);

  TrainHistory history;
  history.initial = evaluate({nets.encoder, nets.decoder, latent}, data, full_condition, probe_eps,
                             config.kl_weight);

  nn::Adam enc_opt(nets.encoder, {.learning_rate = config.learning_rate});
  nn::Adam dec_opt(nets.decoder, {.learning_rate = config.learning_rate});

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  history.epochs.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    ElboTerms sum;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      // Batch statistics of a single row are degenerate.
      if (config.batch_norm && count < 2) continue;
      const nn::Matrix batch =
          data.gather_rows(std::span<const std::size_t>(order).subspan(start, count));
      nn::Matrix eps(count, latent);
      for (double& v : eps.data()) v = noise_rng.normal();

      ElboGradients g;
      try {
        g = gradients(nets, batch, condition_of(batch), eps, config.kl_weight, &dropout_rng);
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " at epoch " + std::to_string(epoch), epoch);
      }
      enc_opt.step(nets.encoder, g.encoder);
      dec_opt.step(nets.decoder, g.decoder);

      const double w = static_cast<double>(count);
      sum.total += w * g.terms.total;
      sum.reconstruction += w * g.terms.reconstruction;
      sum.kl += w * g.terms.kl;
      seen += count;
    }
    const double inv = seen > 0 ? 1.0 / static_cast<double>(seen) : 0.0;
    history.epochs.push_back({sum.total * inv, sum.reconstruction * inv, sum.kl * inv});
  }

  history.final = evaluate({nets.encoder, nets.decoder, latent}, data, full_condition, probe_eps,
                           config.kl_weight);
  return history;
}

nn::Matrix decode_batch(const nn::DenseNetwork& decoder, const nn::Matrix& z,
                        const nn::Matrix& condition) {
  return decoder.forward(z.hconcat(condition));
}

}  // namespace detail

VaeModel make_vae(std::size_t data_dim, const VaeConfig& config, Rng& rng) {
  VaeModel model;
  model.latent_dim = config.latent_dim;
  detail::build(model.encoder, model.decoder, data_dim, 0, config, rng);
  return model;
}

Encoding encode(const VaeModel& model, std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericalError("non-finite encoder input");
  }
  const nn::Vector out = model.encoder.forward(x);
  if (out.size() != 2 * model.latent_dim) throw DimensionError("encoder output must be 2 x latent_dim");
  const auto half = static_cast<std::ptrdiff_t>(model.latent_dim);
  return {nn::Vector(out.begin(), out.begin() + half), nn::Vector(out.begin() + half, out.end())};
}

nn::Vector decode(const VaeModel& model, std::span<const double> z) {
  return model.decoder.forward(z);
}

nn::Vector reparameterize(std::span<const double> mu, std::span<const double> logvar,
                          std::span<const double> eps) {
  if (mu.size() != logvar.size() || mu.size() != eps.size()) {
    throw DimensionError("reparameterize: mu, logvar and eps must have equal length");
  }
  nn::Vector z(mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + std::exp(0.5 * logvar[i]) * eps[i];
  return z;
}

double kl_standard_normal(std::span<const double> mu, std::span<const double> logvar) {
  if (mu.size() != logvar.size()) throw DimensionError("kl: mu and logvar differ in length");
  double total = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    total += mu[j] * mu[j] + std::exp(logvar[j]) - 1.0 - logvar[j];
  }
  return 0.5 * total;
}

ElboTerms elbo_loss(const VaeModel& model, std::span<const double> x, std::span<const double> eps,
                    double kl_weight) {
  return detail::evaluate({model.encoder, model.decoder, model.latent_dim},
                          nn::Matrix::row_vector(x), nn::Matrix(1, 0), nn::Matrix::row_vector(eps),
                          kl_weight);
}

ElboGradients elbo_gradients(VaeModel& model, const nn::Matrix& batch, const nn::Matrix& eps,
                             double kl_weight, Rng* dropout_rng) {
  return detail::gradients({model.encoder, model.decoder, model.latent_dim}, batch,
                           nn::Matrix(batch.rows(), 0), eps, kl_weight, dropout_rng);
}

VaeTrainResult train_vae(const nn::Matrix& data, const VaeConfig& config) {
  Rng master(config.seed);
  Rng init_rng(master.split());
  VaeTrainResult result;
  result.model = make_vae(data.cols(), config, init_rng);
  result.history = detail::train(
      {result.model.encoder, result.model.decoder, result.model.latent_dim}, data, config,
      [](const nn::Matrix& batch) { return nn::Matrix(batch.rows(), 0); }, master);
  return result;
}

nn::Matrix vae_generate(const VaeModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UsageError("number of samples to generate must be positive");
  Rng rng(seed);
  nn::Matrix z(n, model.latent_dim);
  for (double& v : z.data()) v = rng.normal();
  return detail::decode_batch(model.decoder, z, nn::Matrix(n, 0));
}

}  // namespace tabgen::vae
