#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "tabgen/csv.hpp"
#include "tabgen/error.hpp"
#include "tabgen/validation.hpp"
#include "tabgen_cli/commands.hpp"
#include "tabgen_cli/run_config.hpp"

namespace tabgen::cli {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("tabgen_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Context tiny() const {
    Context ctx;
    ctx.out_dir = dir_;
    auto& c = ctx.config;
    c.gan.epochs = 3;
    c.gan.generator_hidden = {8};
    c.gan.discriminator_hidden = {8};
    c.nf.epochs = 3;
    c.nf.hidden = {8};
    c.vae.epochs = 2;
    c.vae.hidden = {8};
    c.cvae = c.vae;
    return ctx;
  }

  fs::path dir_;
};

TEST(RunConfig, ParsesSectionsAndRejectsUnknownKeys) {
  std::istringstream good("# comment\n[vae]\nepochs = 12\nhidden = 4, 5\n\n; other\n[gan]\ninstance_noise=0.25\n");
  const auto c = parse_run_config(good);
  EXPECT_EQ(c.vae.epochs, 12u);
  EXPECT_EQ(c.vae.hidden, (std::vector<std::size_t>{4, 5}));
  EXPECT_EQ(c.gan.instance_noise, 0.25);
  EXPECT_EQ(c.nf.epochs, flow::NfConfig{}.epochs);

  std::istringstream bad_key("[vae]\nepochs = 1\nlaytent = 3\n");
  try {
    parse_run_config(bad_key);
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream bad_section("[vea]\n");
  EXPECT_THROW(parse_run_config(bad_section), UsageError);
  std::istringstream bad_value("[nf]\nepochs = many\n");
  EXPECT_THROW(parse_run_config(bad_value), UsageError);
}

TEST(RunConfig, DigestTracksEffectiveValues) {
  const RunConfig a;
  const RunConfig b;
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 16u);
  RunConfig c;
  c.vae.kl_weight = 0.5;
  EXPECT_NE(config_digest(c), config_digest(a));
  EXPECT_NE(canonical_text(a).find("vae.epochs=3000"), std::string::npos);
}

TEST_F(CliTest, MakeDataIsReproducible) {
  auto ctx = tiny();
  const auto first = slurp(cmd_make_data(ctx).data);
  const auto second = slurp(cmd_make_data(ctx).data);
  EXPECT_EQ(first, second);
  const auto table = data::read_csv(data_file(dir_));
  EXPECT_EQ(table.samples.size(), 200u);
  EXPECT_EQ(table.metadata.at("seed"), "42");
  EXPECT_EQ(table.metadata.at("oracle_version"), data::kOracleVersion);
  ctx.config.dataset.n = 0;
  EXPECT_THROW(cmd_make_data(ctx), UsageError);
}

TEST_F(CliTest, TrainGenerateValidateEveryModel) {
  const auto ctx = tiny();
  const auto data = cmd_make_data(ctx).data;
  for (auto kind : {ModelKind::Gan, ModelKind::Nf, ModelKind::Vae, ModelKind::Cvae}) {
    const auto t = cmd_train(ctx, kind, data);
    EXPECT_TRUE(fs::exists(t.checkpoint));
    EXPECT_TRUE(fs::exists(t.training_log));
    const auto g = cmd_generate(ctx, t.checkpoint);
    EXPECT_EQ(g.generated, 500u);
    const auto table = data::read_csv(g.samples);
    EXPECT_EQ(table.samples.size(), 500u);
    EXPECT_EQ(table.metadata.at("model"), to_string(kind));
    if (g.in_domain > 0) {
      const auto v = cmd_validate(ctx, g.samples, t.checkpoint);
      EXPECT_EQ(validation::load_report(v.report).generated_count, 500u);
    }
  }
  EXPECT_THROW(cmd_generate(ctx, checkpoint_file(dir_, ModelKind::Vae), data_file(dir_)), UsageError);
  EXPECT_THROW(cmd_validate(ctx, samples_file(dir_, "vae"), checkpoint_file(dir_, ModelKind::Gan)), UsageError);
}

TEST_F(CliTest, CvaeLabelsFileFixesCount) {
  const auto ctx = tiny();
  const auto data = cmd_make_data(ctx).data;
  const auto t = cmd_train(ctx, ModelKind::Cvae, data);
  const auto labels = dir_ / "labels.txt";
  std::ofstream(labels) << "0.5\n1.5\n2.5\n";
  EXPECT_EQ(read_labels(labels), (std::vector<double>{0.5, 1.5, 2.5}));
  const auto g = cmd_generate(ctx, t.checkpoint, labels);
  EXPECT_EQ(g.generated, 3u);
  std::ofstream(labels) << "0.5\nabc\n";
  EXPECT_THROW(read_labels(labels), Error);
}

TEST_F(CliTest, ValidateExactOracleSamples) {
  const auto ctx = tiny();
  const auto samples = data::make_training_set(40, 8);
  const auto path = dir_ / "exact.csv";
  validation::export_samples(samples, path,
                             {{"model", "nf"},
                              {"seed", "3"},
                              {"config_digest", "abc"},
                              {"oracle_version", std::string(data::kOracleVersion)}});
  const auto v = cmd_validate(ctx, path);
  const auto r = validation::load_report(v.report);
  EXPECT_EQ(r.model, "nf");
  EXPECT_EQ(r.seed, 3u);
  EXPECT_EQ(r.in_domain_count, 40u);
  for (const auto& o : r.errors.outputs) {
    EXPECT_EQ(o.mu, 0.0);
    EXPECT_EQ(o.sigma, 0.0);
  }

  validation::export_samples(samples, path, {{"model", "nf"}, {"seed", "3"}, {"config_digest", "abc"},
                                             {"oracle_version", "old-oracle"}});
  EXPECT_THROW(cmd_validate(ctx, path), SchemaError);
}

TEST_F(CliTest, MalformedSamplesReportRow) {
  const auto path = dir_ / "bad.csv";
  std::ofstream(path) << "# model=vae seed=1 config_digest=x oracle_version=" << data::kOracleVersion << "\n"
                      << "P1008,P1012,P1022,P1028,P1029,VoidF1,VoidF2,VoidF3,VoidF4\n"
                      << "1,1,1,1,1,0.1,0.2,0.3,0.4\n"
                      << "1,1,1,1,1,0.1,0.2,zz,0.4\n";
  try {
    cmd_validate(tiny(), path);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.row(), 4u);
  }
}

TEST_F(CliTest, CompareNamesMissingFile) {
  const std::vector<fs::path> reports = {dir_ / "gan_report.json", dir_ / "nope_report.json"};
  try {
    cmd_compare(tiny(), reports);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("gan_report.json"), std::string::npos);
  }
}

int run(const std::string& args) {
  const std::string cmd = std::string(TABGEN_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, ExitCodes) {
  const std::string out = " --out " + dir_.string();
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("make-data --n 20" + out), 0);
  EXPECT_EQ(run("make-data --n 0" + out), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("train xyz --data " + data_file(dir_).string() + out), 1);
  EXPECT_EQ(run("train vae --data " + (dir_ / "missing.csv").string() + out), 2);
  std::ofstream(dir_ / "garbage.ckpt") << "not a checkpoint\n";
  EXPECT_EQ(run("generate --checkpoint " + (dir_ / "garbage.ckpt").string() + out), 2);
  std::ofstream(dir_ / "bad.ini") << "[vae]\nunknown = 1\n";
  EXPECT_EQ(run("make-data --config " + (dir_ / "bad.ini").string() + out), 1);
}

}  // namespace
}  // namespace tabgen::cli
