#include "tabgen/gan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabgen/adam.hpp"
#include "tabgen/error.hpp"
#include "tabgen/loss.hpp"

namespace tabgen::gan {

double TrainingLog::mean_accuracy_last(std::size_t n) const {
  if (records.empty()) throw Error("empty training log");
  n = std::min(n, records.size());
  double total = 0.0;
  for (auto it = records.end() - static_cast<std::ptrdiff_t>(n); it != records.end(); ++it) {
    total += 0.5 * (it->accuracy_real + it->accuracy_fake);
  }
  return total / static_cast<double>(n);
}

GanModel make_gan(std::size_t data_dim, const GanConfig& config, Rng& rng) {
  if (config.latent_dim == 0 || data_dim == 0) throw UsageError("GAN dimensions must be positive");
  std::vector<nn::LayerSpec> g_specs;
  for (auto w : config.generator_hidden) g_specs.push_back({w, nn::Activation::ReLU});
  g_specs.push_back({data_dim, nn::Activation::Linear});

  std::vector<nn::LayerSpec> d_specs;
  for (auto w : config.discriminator_hidden) d_specs.push_back({w, nn::Activation::ReLU});
  d_specs.push_back({1, nn::Activation::Sigmoid});

  GanModel model;
  model.latent_dim = config.latent_dim;
  model.generator = nn::DenseNetwork::glorot(config.latent_dim, g_specs, rng);
  model.discriminator = nn::DenseNetwork::glorot(data_dim, d_specs, rng);
  return model;
}

namespace {

double mean_log(std::span<const double> p, bool complement) {
  double total = 0.0;
  for (double v : p) {
    const double c = std::clamp(v, nn::kProbabilityClamp, 1.0 - nn::kProbabilityClamp);
    total += complement ? std::log1p(-c) : std::log(c);
  }
  return total / static_cast<double>(p.size());
}

}  // namespace

double discriminator_loss(std::span<const double> d_real, std::span<const double> d_fake) {
  if (d_real.empty() || d_fake.empty()) throw Error("discriminator loss of an empty batch");
  return -(mean_log(d_real, false) + mean_log(d_fake, true));
}

double generator_loss(std::span<const double> d_fake) {
  if (d_fake.empty()) throw Error("generator loss of an empty batch");
  return -mean_log(d_fake, false);
}

double minimax_objective(std::span<const double> d_real, std::span<const double> d_fake) {
  return -discriminator_loss(d_real, d_fake);
}

double optimal_discriminator(double p_x, double p_g) {
  if (p_x < 0.0 || p_g < 0.0) throw Error("densities must be nonnegative");
  if (p_x == 0.0 && p_g == 0.0) throw Error("optimal discriminator undefined where both densities vanish");
  return p_x / (p_x + p_g);
}

DiscriminatorGradients discriminator_gradients(const GanModel& model, const nn::Matrix& real,
                                               const nn::Matrix& latent) {
  return discriminator_gradients_on(model, real, model.generator.forward(latent));
}

DiscriminatorGradients discriminator_gradients_on(const GanModel& model, const nn::Matrix& real,
                                                  const nn::Matrix& fake) {
  nn::Tape real_tape;
  nn::Tape fake_tape;
  const nn::Matrix d_real = model.discriminator.forward(real, real_tape);
  const nn::Matrix d_fake = model.discriminator.forward(fake, fake_tape);

  const auto real_loss = nn::mean_binary_cross_entropy(d_real, 1.0);
  const auto fake_loss = nn::mean_binary_cross_entropy(d_fake, 0.0);

  DiscriminatorGradients out;
  out.loss = real_loss.value + fake_loss.value;
  out.discriminator = model.discriminator.backward(real_tape, real_loss.gradient).parameters;
  out.discriminator += model.discriminator.backward(fake_tape, fake_loss.gradient).parameters;

  std::size_t correct_real = 0;
  for (double p : d_real.data()) correct_real += p >= 0.5 ? 1 : 0;
  std::size_t correct_fake = 0;
  for (double p : d_fake.data()) correct_fake += p < 0.5 ? 1 : 0;
  out.accuracy_real = static_cast<double>(correct_real) / static_cast<double>(d_real.rows());
  out.accuracy_fake = static_cast<double>(correct_fake) / static_cast<double>(d_fake.rows());
  return out;
}

GeneratorGradients generator_gradients(const GanModel& model, const nn::Matrix& latent,
                                       const nn::Matrix* input_noise) {
  nn::Tape g_tape;
  nn::Tape d_tape;
  nn::Matrix fake = model.generator.forward(latent, g_tape);
  if (input_noise != nullptr) {
    if (input_noise->rows() != fake.rows() || input_noise->cols() != fake.cols()) {
      throw DimensionError("instance noise shape does not match the generated batch");
    }
    for (std::size_t i = 0; i < fake.data().size(); ++i) fake.data()[i] += input_noise->data()[i];
  }
  const nn::Matrix d_fake = model.discriminator.forward(fake, d_tape);
  const auto loss = nn::mean_binary_cross_entropy(d_fake, 1.0);

  const auto through_d = model.discriminator.backward(d_tape, loss.gradient);
  GeneratorGradients out;
  out.loss = loss.value;
  out.generator = model.generator.backward(g_tape, through_d.input).parameters;
  return out;
}

nn::Matrix sample_latent(std::size_t n, std::size_t latent_dim, Rng& rng) {
  nn::Matrix z(n, latent_dim);
  for (double& v : z.data()) v = rng.normal();
  return z;
}

GanTrainResult train_gan(const nn::Matrix& data, const GanConfig& config) {
  if (data.rows() == 0) throw UsageError("GAN training data is empty");
  if (config.epochs == 0 || config.batch_size == 0) throw UsageError("GAN epochs and batch size must be positive");

  Rng master(config.seed);
  Rng init_rng(master.split());
  Rng shuffle_rng(master.split());
  Rng noise_rng(master.split());
  Rng instance_rng(master.split());
  if (config.instance_noise < 0.0) throw UsageError("GAN instance_noise must be nonnegative");
  auto add_noise = [&](nn::Matrix& m) {
    for (double& v : m.data()) v += config.instance_noise * instance_rng.normal();
  };
  const bool noisy = config.instance_noise > 0.0;

  GanTrainResult result{make_gan(data.cols(), config, init_rng), {}};
  auto& model = result.model;
  nn::Adam g_opt(model.generator, {.learning_rate = config.generator_learning_rate});
  nn::Adam d_opt(model.discriminator, {.learning_rate = config.discriminator_learning_rate});

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  result.log.records.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    EpochRecord rec{.epoch = epoch};
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      const nn::Matrix real =
          data.gather_rows(std::span<const std::size_t>(order).subspan(start, count));

      nn::Matrix fake = model.generator.forward(sample_latent(count, model.latent_dim, noise_rng));
      nn::Matrix noisy_real = real;
      if (noisy) {
        add_noise(noisy_real);
        add_noise(fake);
      }
      const auto d = discriminator_gradients_on(model, noisy_real, fake);
      if (!std::isfinite(d.loss)) {
        throw NumericalError("discriminator loss diverged at epoch " + std::to_string(epoch), epoch);
      }
      d_opt.step(model.discriminator, d.discriminator);

      const nn::Matrix latent = sample_latent(count, model.latent_dim, noise_rng);
      nn::Matrix g_noise(count, model.data_dim());
      if (noisy) add_noise(g_noise);
      const auto g = generator_gradients(model, latent, noisy ? &g_noise : nullptr);
      if (!std::isfinite(g.loss)) {
        throw NumericalError("generator loss diverged at epoch " + std::to_string(epoch), epoch);
      }
      g_opt.step(model.generator, g.generator);

      rec.discriminator_loss += d.loss;
      rec.generator_loss += g.loss;
      rec.accuracy_real += d.accuracy_real;
      rec.accuracy_fake += d.accuracy_fake;
      ++batches;
    }
    const double inv = 1.0 / static_cast<double>(batches);
    rec.discriminator_loss *= inv;
    rec.generator_loss *= inv;
    rec.accuracy_real *= inv;
    rec.accuracy_fake *= inv;
    result.log.records.push_back(rec);
  }
  return result;
}

nn::Matrix gan_generate(const GanModel& model, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw UsageError("number of samples to generate must be positive");
  Rng rng(seed);
  return model.generator.forward(sample_latent(n, model.latent_dim, rng));
}

}  // namespace tabgen::gan
