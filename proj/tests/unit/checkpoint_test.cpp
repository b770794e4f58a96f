#include <sstream>

#include <gtest/gtest.h>

#include "tabgen/checkpoint.hpp"
#include "tabgen/error.hpp"

namespace tabgen {
namespace {

using nn::Matrix;

Checkpoint make(AnyModel model) {
  Checkpoint c;
  c.seed = 1234;
  c.config_digest = "00ff00ff00ff00ff";
  c.standardizer = data::Standardizer::fit(data::make_training_set(50, 3));
  c.model = std::move(model);
  return c;
}

AnyModel build(ModelKind kind, Rng& rng) {
  switch (kind) {
    case ModelKind::Gan: {
      gan::GanConfig c;
      c.generator_hidden = {8, 8};
      c.discriminator_hidden = {8};
      return gan::make_gan(9, c, rng);
    }
    case ModelKind::Nf: {
      const std::vector<std::size_t> hidden = {8};
      return flow::make_flow(9, 3, hidden, rng);
    }
    case ModelKind::Vae: {
      vae::VaeConfig c;
      c.hidden = {8, 8};
      return vae::make_vae(9, c, rng);
    }
    case ModelKind::Cvae: {
      vae::VaeConfig c;
      c.hidden = {8, 8};
      return cvae::make_cvae(9, c, 0, rng);
    }
  }
  return {};
}

Matrix generate(const AnyModel& m) {
  switch (m.index()) {
    case 0: return gan::gan_generate(std::get<0>(m), 20, 5);
    case 1: return flow::nf_generate(std::get<1>(m), 20, 5);
    case 2: return vae::vae_generate(std::get<2>(m), 20, 5);
    default: {
      const std::vector<double> labels = {-1.0, 0.0, 0.5, 1.0};
      return cvae::cvae_generate_standardized(std::get<3>(m), labels, 5);
    }
  }
}

class CheckpointRoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(CheckpointRoundTrip, RegeneratesIdenticalSamples) {
  Rng rng(9);
  auto model = build(GetParam(), rng);
  if (auto* v = std::get_if<vae::VaeModel>(&model)) {
    // Non-trivial running statistics must survive too.
    auto& norm = *v->decoder.layer(0).norm;
    for (double& x : norm.running_mean) x = rng.normal();
  }
  const auto original = make(model);
  std::stringstream ss;
  write_checkpoint(ss, original);
  const std::string text = ss.str();
  const auto back = read_checkpoint(ss);
  EXPECT_EQ(back.kind(), GetParam());
  EXPECT_EQ(back.seed, 1234u);
  EXPECT_EQ(back.config_digest, original.config_digest);
  EXPECT_EQ(back.oracle_version, data::kOracleVersion);
  EXPECT_EQ(back.standardizer.means(), original.standardizer.means());
  EXPECT_EQ(back.standardizer.stds(), original.standardizer.stds());
  EXPECT_EQ(generate(back.model), generate(original.model));

  std::stringstream again;
  write_checkpoint(again, back);
  EXPECT_EQ(again.str(), text);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, CheckpointRoundTrip,
                         ::testing::Values(ModelKind::Gan, ModelKind::Nf, ModelKind::Vae, ModelKind::Cvae),
                         [](const auto& info) { return std::string(to_string(info.param)); });

std::string serialized(ModelKind kind) {
  Rng rng(1);
  std::stringstream ss;
  write_checkpoint(ss, make(build(kind, rng)));
  return ss.str();
}

std::string read_error(const std::string& text) {
  std::stringstream ss(text);
  try {
    read_checkpoint(ss);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

TEST(CheckpointErrors, BadMagic) {
  auto text = serialized(ModelKind::Vae);
  text.replace(0, 6, "OTHER!");
  const auto msg = read_error(text);
  EXPECT_NE(msg.find("magic"), std::string::npos) << msg;
}

TEST(CheckpointErrors, TruncatedBodyNamesHeader) {
  const auto text = serialized(ModelKind::Nf);
  const auto msg = read_error(text.substr(0, text.size() / 2));
  EXPECT_NE(msg.find("model=nf"), std::string::npos) << msg;
  EXPECT_NE(msg.find("seed=1234"), std::string::npos) << msg;
}

TEST(CheckpointErrors, UnknownModel) {
  auto text = serialized(ModelKind::Gan);
  const auto pos = text.find("model gan");
  text.replace(pos, 9, "model xyz");
  const auto msg = read_error(text);
  EXPECT_NE(msg.find("xyz"), std::string::npos) << msg;
}

TEST(CheckpointErrors, MissingFileIsIoError) {
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/model.ckpt"), IoError);
}

TEST(ModelKindNames, ParseAndPrint) {
  for (auto k : {ModelKind::Gan, ModelKind::Nf, ModelKind::Vae, ModelKind::Cvae}) {
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_model_kind("realnvp2"), UsageError);
}

}  // namespace
}  // namespace tabgen
