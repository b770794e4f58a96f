#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabgen/error.hpp"
#include "tabgen_cli/commands.hpp"

namespace {

namespace cli = tabgen::cli;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kDivergence = 3 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "INI run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Seed for this command's section");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
}

cli::Context context(const Common& c) {
  cli::Context ctx;
  if (!c.config.empty()) ctx.config = cli::load_run_config(c.config);
  ctx.out_dir = c.out;
  ctx.console = &std::cout;
  const int level = cli::log_level_from_env();
  ctx.log = level > 0 ? &std::cerr : nullptr;
  if (level > 1) std::cerr << "[tabgen] effective config\n" << cli::canonical_text(ctx.config);
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic tabular data from GAN, real NVP, VAE and CVAE models"};
  app.require_subcommand(1);

  Common make_opts;
  std::optional<std::size_t> make_n;
  auto* make = app.add_subcommand("make-data", "Write the oracle-labelled training set");
  add_common(make, make_opts);
  make->add_option("--n", make_n, "Number of samples");

  Common train_opts;
  std::string train_model;
  std::string train_data;
  auto* train = app.add_subcommand("train", "Train one model and write a checkpoint");
  add_common(train, train_opts);
  train->add_option("model", train_model, "gan, nf, vae or cvae")->required();
  train->add_option("--data", train_data, "Training CSV")->required();

  Common gen_opts;
  std::string gen_ckpt;
  std::optional<std::size_t> gen_n;
  std::string gen_labels;
  auto* generate = app.add_subcommand("generate", "Sample from a checkpoint");
  add_common(generate, gen_opts);
  generate->add_option("--checkpoint", gen_ckpt, "Checkpoint file")->required();
  generate->add_option("--n", gen_n, "Number of samples");
  generate->add_option("--labels", gen_labels, "CVAE only: P1008 values, one per line");

  Common val_opts;
  std::string val_samples;
  std::string val_ckpt;
  auto* validate = app.add_subcommand("validate", "Score generated samples against the oracle");
  add_common(validate, val_opts);
  validate->add_option("--samples", val_samples, "Generated samples CSV")->required();
  validate->add_option("--checkpoint", val_ckpt, "Checkpoint the samples came from (cross-check)");

  Common cmp_opts;
  std::vector<std::string> cmp_reports;
  auto* compare = app.add_subcommand("compare", "Rank the four model reports");
  add_common(compare, cmp_opts);
  compare->add_option("reports", cmp_reports, "Report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (make->parsed()) {
      auto ctx = context(make_opts);
      if (make_opts.seed) ctx.config.dataset.seed = *make_opts.seed;
      if (make_n) ctx.config.dataset.n = *make_n;
      cli::cmd_make_data(ctx);
    } else if (train->parsed()) {
      const auto kind = tabgen::parse_model_kind(train_model);
      auto ctx = context(train_opts);
      if (train_opts.seed) {
        switch (kind) {
          case tabgen::ModelKind::Gan: ctx.config.gan.seed = *train_opts.seed; break;
          case tabgen::ModelKind::Nf: ctx.config.nf.seed = *train_opts.seed; break;
          case tabgen::ModelKind::Vae: ctx.config.vae.seed = *train_opts.seed; break;
          case tabgen::ModelKind::Cvae: ctx.config.cvae.seed = *train_opts.seed; break;
        }
      }
      cli::cmd_train(ctx, kind, train_data);
    } else if (generate->parsed()) {
      auto ctx = context(gen_opts);
      if (gen_opts.seed) ctx.config.generate.seed = *gen_opts.seed;
      if (gen_n) ctx.config.generate.n = *gen_n;
      std::optional<std::filesystem::path> labels;
      if (!gen_labels.empty()) labels = gen_labels;
      cli::cmd_generate(ctx, gen_ckpt, labels);
    } else if (validate->parsed()) {
      std::optional<std::filesystem::path> ckpt;
      if (!val_ckpt.empty()) ckpt = val_ckpt;
      cli::cmd_validate(context(val_opts), val_samples, ckpt);
    } else if (compare->parsed()) {
      const std::vector<std::filesystem::path> paths(cmp_reports.begin(), cmp_reports.end());
      cli::cmd_compare(context(cmp_opts), paths);
    }
  } catch (const tabgen::UsageError& e) {
    std::cerr << "tabgen: " << e.what() << '\n';
    return kUsage;
  } catch (const tabgen::NumericalError& e) {
    std::cerr << "tabgen: " << e.what() << '\n';
    return kDivergence;
  } catch (const tabgen::Error& e) {
    std::cerr << "tabgen: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
