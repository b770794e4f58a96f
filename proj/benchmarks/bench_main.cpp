#include <benchmark/benchmark.h>

#include "tabgen/cvae.hpp"
#include "tabgen/dataset.hpp"
#include "tabgen/gan.hpp"
#include "tabgen/realnvp.hpp"
#include "tabgen/standardizer.hpp"
#include "tabgen/vae.hpp"

namespace {

using namespace tabgen;
using nn::Matrix;

Matrix training_matrix() {
  const auto samples = data::make_training_set(200, 42);
  return data::Standardizer::fit(samples).standardize(samples);
}

Matrix normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

void BM_Oracle(benchmark::State& state) {
  Rng rng(1);
  data::PmpVector p;
  for (auto _ : state) {
    p.p1008 = rng.uniform(0.0, 5.0);
    benchmark::DoNotOptimize(data::oracle_evaluate(p));
  }
}
BENCHMARK(BM_Oracle);

void BM_DenseForwardBackward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const std::vector<nn::LayerSpec> specs = {
      {width, nn::Activation::ReLU, true}, {width, nn::Activation::ReLU, true}, {9, nn::Activation::Linear}};
  auto net = nn::DenseNetwork::glorot(9, specs, rng);
  const Matrix x = normal_matrix(32, 9, 3);
  const Matrix upstream = normal_matrix(32, 9, 4);
  for (auto _ : state) {
    nn::Tape tape;
    net.forward_train(x, tape, rng);
    benchmark::DoNotOptimize(net.backward(tape, upstream));
  }
}
BENCHMARK(BM_DenseForwardBackward)->Arg(32)->Arg(64)->Arg(128);

void BM_GanStep(benchmark::State& state) {
  const Matrix data = training_matrix();
  Rng rng(5);
  auto model = gan::make_gan(9, gan::GanConfig{}, rng);
  Matrix real(32, 9);
  for (std::size_t i = 0; i < 32; ++i) std::copy_n(data.row(i).begin(), 9, real.row(i).begin());
  for (auto _ : state) {
    const Matrix latent = gan::sample_latent(32, model.latent_dim, rng);
    benchmark::DoNotOptimize(gan::discriminator_gradients(model, real, latent));
    benchmark::DoNotOptimize(gan::generator_gradients(model, latent));
  }
}
BENCHMARK(BM_GanStep);

void BM_NfNllGradients(benchmark::State& state) {
  const Matrix data = training_matrix();
  Rng rng(6);
  const flow::NfConfig config;
  auto stack = flow::make_flow(9, config.layers, config.hidden, rng);
  for (auto _ : state) benchmark::DoNotOptimize(flow::nll_gradients(stack, data));
}
BENCHMARK(BM_NfNllGradients)->Unit(benchmark::kMillisecond);

void BM_VaeStep(benchmark::State& state) {
  Rng rng(7);
  auto model = vae::make_vae(9, vae::VaeConfig{}, rng);
  const Matrix batch = normal_matrix(30, 9, 8);
  const Matrix eps = normal_matrix(30, model.latent_dim, 9);
  for (auto _ : state) benchmark::DoNotOptimize(vae::elbo_gradients(model, batch, eps, 1.0, &rng));
}
BENCHMARK(BM_VaeStep);

void BM_CvaeGenerate(benchmark::State& state) {
  Rng rng(10);
  const auto model = cvae::make_cvae(9, cvae::CvaeConfig{}, 0, rng);
  const std::vector<double> labels(500, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(cvae::cvae_generate_standardized(model, labels, 11));
}
BENCHMARK(BM_CvaeGenerate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
