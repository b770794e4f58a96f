#include "tabgen_cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "tabgen/csv.hpp"
#include "tabgen/error.hpp"
#include "tabgen/serialize.hpp"
#include "tabgen/standardizer.hpp"
#include "tabgen/validation.hpp"

namespace tabgen::cli {

namespace {

void info(const Context& ctx, const std::string& message) {
  if (ctx.log != nullptr) *ctx.log << "[tabgen] " << message << '\n';
}

std::ostream& console(const Context& ctx) {
  static std::ostream discard(nullptr);
  return ctx.console != nullptr ? *ctx.console : discard;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string metadata_value(const data::Metadata& m, const std::string& key, const fs::path& file) {
  const auto it = m.find(key);
  if (it == m.end()) {
    throw SchemaError("'" + file.string() + "' has no '" + key + "' entry in its metadata line");
  }
  return it->second;
}

std::uint64_t model_seed(const RunConfig& c, ModelKind kind) {
  switch (kind) {
    case ModelKind::Gan:
      return c.gan.seed;
    case ModelKind::Nf:
      return c.nf.seed;
    case ModelKind::Vae:
      return c.vae.seed;
    case ModelKind::Cvae:
      return c.cvae.seed;
  }
  return 0;
}

std::string gan_log(const gan::TrainingLog& log) {
  std::ostringstream out;
  out << "epoch,generator_loss,discriminator_loss,accuracy_real,accuracy_fake\n";
  for (const auto& r : log.records) {
    out << r.epoch << ',' << format_double(r.generator_loss) << ',' << format_double(r.discriminator_loss)
        << ',' << format_double(r.accuracy_real) << ',' << format_double(r.accuracy_fake) << '\n';
  }
  return out.str();
}

std::string nf_log(const std::vector<double>& ll) {
  std::ostringstream out;
  out << "epoch,mean_log_likelihood\n";
  for (std::size_t i = 0; i < ll.size(); ++i) out << i << ',' << format_double(ll[i]) << '\n';
  return out.str();
}

std::string elbo_log(const vae::TrainHistory& h) {
  std::ostringstream out;
  out << "epoch,loss,reconstruction,kl\n";
  for (std::size_t i = 0; i < h.epochs.size(); ++i) {
    const auto& t = h.epochs[i];
    out << i << ',' << format_double(t.total) << ',' << format_double(t.reconstruction) << ','
        << format_double(t.kl) << '\n';
  }
  return out.str();
}

void print_table(std::ostream& out, const validation::ModelReport& r) {
  out << r.model << ": " << r.in_domain_count << " of " << r.generated_count << " samples in domain\n";
  out << std::left << std::setw(12) << "";
  for (std::size_t j = 0; j < data::kNumOutputs; ++j) {
    out << std::right << std::setw(13) << data::kColumnNames[data::kNumInputs + j];
  }
  out << '\n' << std::scientific << std::setprecision(3);
  out << std::left << std::setw(12) << "mu_error";
  for (const auto& o : r.errors.outputs) out << std::right << std::setw(13) << o.mu;
  out << '\n' << std::left << std::setw(12) << "sigma_error";
  for (const auto& o : r.errors.outputs) out << std::right << std::setw(13) << o.sigma;
  out << '\n' << std::defaultfloat;
}

}  // namespace

int log_level_from_env() {
  const char* v = std::getenv("TABGEN_LOG");
  if (v == nullptr) return 1;
  const std::string s(v);
  if (s == "0" || s == "quiet" || s == "off") return 0;
  if (s == "2" || s == "debug") return 2;
  return 1;
}

fs::path data_file(const fs::path& dir) { return dir / "data.csv"; }
fs::path checkpoint_file(const fs::path& dir, ModelKind model) {
  return dir / (std::string(to_string(model)) + ".ckpt");
}
fs::path training_log_file(const fs::path& dir, ModelKind model) {
  return dir / (std::string(to_string(model)) + "_train_log.csv");
}
fs::path samples_file(const fs::path& dir, std::string_view model) {
  return dir / (std::string(model) + "_samples.csv");
}
fs::path report_file(const fs::path& dir, std::string_view model) {
  return dir / (std::string(model) + "_report.json");
}
fs::path errors_file(const fs::path& dir, std::string_view model) {
  return dir / (std::string(model) + "_errors.csv");
}
fs::path comparison_file(const fs::path& dir) { return dir / "comparison.json"; }

MakeDataOutputs cmd_make_data(const Context& ctx) {
  const auto& c = ctx.config.dataset;
  if (c.n == 0) throw UsageError("dataset size n must be positive");
  prepare_dir(ctx.out_dir);
  const auto samples = data::make_training_set(c.n, c.seed);
  MakeDataOutputs out{data_file(ctx.out_dir)};
  data::save_csv(out.data, samples,
                 {.metadata = {{"kind", "training"},
                               {"n", std::to_string(c.n)},
                               {"seed", std::to_string(c.seed)},
                               {"config_digest", config_digest(ctx.config)},
                               {"oracle_version", std::string(data::kOracleVersion)}}});

  auto& con = console(ctx);
  con << "wrote " << c.n << " samples (seed " << c.seed << ") to " << out.data.string() << '\n';
  for (std::size_t j = 0; j < data::kSampleDim; ++j) {
    double lo = samples.front().to_array()[j];
    double hi = lo;
    for (const auto& s : samples) {
      lo = std::min(lo, s.to_array()[j]);
      hi = std::max(hi, s.to_array()[j]);
    }
    con << "  " << std::left << std::setw(8) << data::kColumnNames[j] << " [" << lo << ", " << hi << "]\n";
  }
  return out;
}

TrainOutputs cmd_train(const Context& ctx, ModelKind model, const fs::path& data_path) {
  const auto table = data::read_csv(data_path);
  const auto standardizer = data::Standardizer::fit(table.samples);
  const nn::Matrix x = standardizer.standardize(table.samples);
  const auto& c = ctx.config;
  const std::string name(to_string(model));
  info(ctx, "training " + name + " on " + std::to_string(x.rows()) + " samples");

  Checkpoint ckpt;
  ckpt.seed = model_seed(c, model);
  ckpt.config_digest = config_digest(c);
  ckpt.standardizer = standardizer;
  std::string log_text;
  std::string summary;
  switch (model) {
    case ModelKind::Gan: {
      auto r = gan::train_gan(x, c.gan);
      log_text = gan_log(r.log);
      summary = "discriminator accuracy (last 100 epochs) " + format_double(r.log.mean_accuracy_last(100));
      ckpt.model = std::move(r.model);
      break;
    }
    case ModelKind::Nf: {
      auto r = flow::train_nf(x, c.nf);
      log_text = nf_log(r.mean_log_likelihood);
      summary = "mean log-likelihood " + format_double(r.mean_log_likelihood.front()) + " -> " +
                format_double(r.mean_log_likelihood.back());
      ckpt.model = std::move(r.stack);
      break;
    }
    case ModelKind::Vae: {
      auto r = vae::train_vae(x, c.vae);
      log_text = elbo_log(r.history);
      summary = "loss " + format_double(r.history.initial.total) + " -> " + format_double(r.history.final.total);
      ckpt.model = std::move(r.model);
      break;
    }
    case ModelKind::Cvae: {
      auto r = cvae::train_cvae(x, c.cvae, c.cvae_label_index);
      log_text = elbo_log(r.history);
      summary = "loss " + format_double(r.history.initial.total) + " -> " + format_double(r.history.final.total);
      ckpt.model = std::move(r.model);
      break;
    }
  }

  prepare_dir(ctx.out_dir);
  TrainOutputs out{checkpoint_file(ctx.out_dir, model), training_log_file(ctx.out_dir, model)};
  save_checkpoint(out.checkpoint, ckpt);
  const data::Metadata meta{{"model", name},
                            {"seed", std::to_string(ckpt.seed)},
                            {"config_digest", ckpt.config_digest},
                            {"oracle_version", ckpt.oracle_version}};
  write_file(out.training_log, data::format_metadata(meta) + "\n" + log_text);
  console(ctx) << name << ": " << summary << "\n  checkpoint " << out.checkpoint.string() << "\n  log        "
               << out.training_log.string() << '\n';
  return out;
}

std::vector<double> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labels file '" + path.string() + "'");
  std::vector<double> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    try {
      labels.push_back(parse_double(std::string_view(line).substr(first, last - first + 1)));
    } catch (const Error&) {
      throw SchemaError("labels file '" + path.string() + "': line " + std::to_string(line_no) +
                            " is not a number",
                        line_no, 1);
    }
  }
  if (labels.empty()) throw SchemaError("labels file '" + path.string() + "' has no values");
  return labels;
}

GenerateOutputs cmd_generate(const Context& ctx, const fs::path& checkpoint_path,
                             const std::optional<fs::path>& labels_path) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const auto kind = ckpt.kind();
  const std::string name(to_string(kind));
  const auto& g = ctx.config.generate;
  if (g.n == 0) throw UsageError("number of samples to generate must be positive");
  if (labels_path && kind != ModelKind::Cvae) {
    throw UsageError("--labels only applies to cvae checkpoints, this one is " + name);
  }

  nn::Matrix z;
  switch (kind) {
    case ModelKind::Gan:
      z = gan::gan_generate(std::get<gan::GanModel>(ckpt.model), g.n, g.seed);
      break;
    case ModelKind::Nf:
      z = flow::nf_generate(std::get<flow::FlowStack>(ckpt.model), g.n, g.seed);
      break;
    case ModelKind::Vae:
      z = vae::vae_generate(std::get<vae::VaeModel>(ckpt.model), g.n, g.seed);
      break;
    case ModelKind::Cvae: {
      Rng master(g.seed);
      const std::uint64_t label_seed = master.split();
      const std::uint64_t sample_seed = master.split();
      const auto labels = labels_path ? read_labels(*labels_path) : cvae::uniform_labels(g.n, label_seed);
      z = cvae::cvae_generate(std::get<cvae::CvaeModel>(ckpt.model), labels, sample_seed, ckpt.standardizer);
      break;
    }
  }
  if (!z.all_finite()) throw NumericalError(name + " generated non-finite values");
  const auto samples = ckpt.standardizer.destandardize(z);

  prepare_dir(ctx.out_dir);
  GenerateOutputs out{samples_file(ctx.out_dir, name), samples.size(),
                      data::in_domain_filter(samples).kept.size()};
  validation::export_samples(samples, out.samples,
                             {{"model", name},
                              {"seed", std::to_string(g.seed)},
                              {"train_seed", std::to_string(ckpt.seed)},
                              {"config_digest", config_digest(ctx.config)},
                              {"train_config_digest", ckpt.config_digest.empty() ? "-" : ckpt.config_digest},
                              {"oracle_version", ckpt.oracle_version}});
  console(ctx) << name << ": " << out.in_domain << " of " << out.generated << " samples in domain, wrote "
               << out.samples.string() << '\n';
  return out;
}

ValidateOutputs cmd_validate(const Context& ctx, const fs::path& samples_path,
                             const std::optional<fs::path>& checkpoint_path) {
  const auto table = data::read_csv(samples_path);
  const std::string model = metadata_value(table.metadata, "model", samples_path);
  const std::string oracle = metadata_value(table.metadata, "oracle_version", samples_path);
  if (oracle != data::kOracleVersion) {
    throw SchemaError("samples were labelled for oracle '" + oracle + "' but this build has '" +
                      std::string(data::kOracleVersion) + "'");
  }
  if (checkpoint_path) {
    const Checkpoint ckpt = load_checkpoint(*checkpoint_path);
    if (to_string(ckpt.kind()) != model) {
      throw UsageError("checkpoint is a " + std::string(to_string(ckpt.kind())) + " model but the samples came from " +
                       model);
    }
  }
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(metadata_value(table.metadata, "seed", samples_path));
  } catch (const std::logic_error&) {
    throw SchemaError("'" + samples_path.string() + "' has a non-numeric seed in its metadata line");
  }
  const std::string digest = metadata_value(table.metadata, "config_digest", samples_path);

  const auto result = validation::validate_samples(table.samples);
  auto report = validation::make_report(model, result, seed, digest);
  report.oracle_version = oracle;

  prepare_dir(ctx.out_dir);
  ValidateOutputs out{report_file(ctx.out_dir, model), errors_file(ctx.out_dir, model)};
  validation::export_report(report, out.report);
  validation::export_errors(model, result.records, out.errors,
                            {{"model", model}, {"config_digest", digest}, {"oracle_version", oracle}});
  print_table(console(ctx), report);
  return out;
}

fs::path cmd_compare(const Context& ctx, std::span<const fs::path> report_paths) {
  std::vector<validation::ModelReport> reports;
  for (const auto& p : report_paths) {
    if (!fs::exists(p)) throw IoError("report file '" + p.string() + "' does not exist");
    reports.push_back(validation::load_report(p));
  }
  const auto cmp = validation::compare_models(reports);
  prepare_dir(ctx.out_dir);
  const fs::path out = comparison_file(ctx.out_dir);
  validation::export_comparison(cmp, out);

  auto& con = console(ctx);
  con << std::left << std::setw(8) << "model" << std::right << std::setw(11) << "generated" << std::setw(11)
      << "in_domain" << std::setw(14) << "mean_sigma" << '\n';
  for (const auto& r : cmp.models) {
    con << std::left << std::setw(8) << r.model << std::right << std::setw(11) << r.generated_count
        << std::setw(11) << r.in_domain_count << std::setw(14) << std::scientific << std::setprecision(3)
        << r.errors.mean_sigma() << std::defaultfloat << '\n';
  }
  con << "ranking by mean sigma_error:";
  for (std::size_t i = 0; i < cmp.ranking.size(); ++i) con << ' ' << (i + 1) << '.' << cmp.ranking[i];
  con << "\nwrote " << out.string() << '\n';
  return out;
}

}  // namespace tabgen::cli
