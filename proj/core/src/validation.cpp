#include "tabgen/validation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tabgen/error.hpp"
#include "tabgen/serialize.hpp"

namespace tabgen::validation {

using nlohmann::json;

double ErrorStats::mean_sigma() const {
  double total = 0.0;
  for (const auto& o : outputs) total += o.sigma;
  return total / static_cast<double>(outputs.size());
}

ErrorStats error_statistics(std::span<const ErrorRecord> records) {
  ErrorStats stats;
  stats.n_validated = records.size();
  if (records.empty()) return stats;
  const double n = static_cast<double>(records.size());
  for (std::size_t j = 0; j < data::kNumOutputs; ++j) {
    double mean = 0.0;
    for (const auto& r : records) mean += r.errors[j];
    mean /= n;
    double var = 0.0;
    for (const auto& r : records) {
      const double d = r.errors[j] - mean;
      var += d * d;
    }
    stats.outputs[j] = {mean, std::sqrt(var / n)};
  }
  return stats;
}

ValidationResult validate_samples(std::span<const data::Sample> samples) {
  ValidationResult result;
  result.generated_count = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!data::in_domain(s.inputs)) continue;
    const auto truth = data::oracle_evaluate(s.inputs).to_array();
    const auto generated = s.outputs.to_array();
    ErrorRecord rec{.sample_index = i};
    for (std::size_t j = 0; j < data::kNumOutputs; ++j) rec.errors[j] = generated[j] - truth[j];
    result.records.push_back(rec);
  }
  result.in_domain_count = result.records.size();
  if (result.records.empty()) throw Error("no generated sample lies inside the training domain");
  result.stats = error_statistics(result.records);
  return result;
}

ValidationResult validate(const nn::Matrix& standardized, const data::Standardizer& standardizer) {
  if (!standardized.all_finite()) throw NumericalError("generated samples contain non-finite values");
  const auto samples = standardizer.destandardize(standardized);
  return validate_samples(samples);
}

ModelReport make_report(std::string model, const ValidationResult& result, std::uint64_t seed,
                        std::string config_digest) {
  ModelReport r;
  r.model = std::move(model);
  r.generated_count = result.generated_count;
  r.in_domain_count = result.in_domain_count;
  r.errors = result.stats;
  r.seed = seed;
  r.config_digest = std::move(config_digest);
  return r;
}

ComparisonReport compare_models(std::span<const ModelReport> reports) {
  std::map<std::string, const ModelReport*> by_name;
  for (const auto& r : reports) {
    if (std::find(kModelNames.begin(), kModelNames.end(), r.model) == kModelNames.end()) {
      throw Error("unknown model '" + r.model + "' in comparison");
    }
    if (!by_name.emplace(r.model, &r).second) throw Error("duplicate report for model '" + r.model + "'");
  }
  std::string missing;
  for (auto name : kModelNames) {
    if (!by_name.contains(std::string(name))) missing += (missing.empty() ? "" : ", ") + std::string(name);
  }
  if (!missing.empty()) throw Error("missing reports for: " + missing);

  ComparisonReport out;
  for (auto name : kModelNames) out.models.push_back(*by_name.at(std::string(name)));
  for (const auto& r : out.models) {
    if (r.oracle_version != out.models.front().oracle_version) {
      throw Error("reports were produced under different oracle versions ('" +
                  out.models.front().oracle_version + "' vs '" + r.oracle_version + "')");
    }
    if (r.in_domain_count > r.generated_count) {
      throw Error("report for '" + r.model + "' has more in-domain than generated samples");
    }
  }
  std::vector<const ModelReport*> order;
  for (const auto& r : out.models) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ModelReport* a, const ModelReport* b) {
    return a->errors.mean_sigma() < b->errors.mean_sigma();
  });
  for (const auto* r : order) out.ranking.push_back(r->model);
  return out;
}

namespace {

json report_json(const ModelReport& r) {
  json errors = json::object();
  for (std::size_t j = 0; j < data::kNumOutputs; ++j) {
    errors[std::string(kOutputKeys[j])] = {{"mu", r.errors.outputs[j].mu},
                                           {"sigma", r.errors.outputs[j].sigma}};
  }
  return {{"model", r.model},
          {"generated_count", r.generated_count},
          {"in_domain_count", r.in_domain_count},
          {"n_validated", r.errors.n_validated},
          {"errors", errors},
          {"seed", r.seed},
          {"config_digest", r.config_digest},
          {"oracle_version", r.oracle_version}};
}

ModelReport report_from(const json& j) {
  ModelReport r;
  try {
    r.model = j.at("model").get<std::string>();
    r.generated_count = j.at("generated_count").get<std::size_t>();
    r.in_domain_count = j.at("in_domain_count").get<std::size_t>();
    r.errors.n_validated = j.value("n_validated", r.in_domain_count);
    for (std::size_t k = 0; k < data::kNumOutputs; ++k) {
      const auto& e = j.at("errors").at(std::string(kOutputKeys[k]));
      r.errors.outputs[k] = {e.at("mu").get<double>(), e.at("sigma").get<double>()};
    }
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.oracle_version = j.at("oracle_version").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid report: ") + e.what());
  }
  return r;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string report_to_json(const ModelReport& report) { return report_json(report).dump(2) + "\n"; }

ModelReport report_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report is not valid JSON: ") + e.what());
  }
  return report_from(j);
}

std::string comparison_to_json(const ComparisonReport& report) {
  json models = json::array();
  for (const auto& r : report.models) models.push_back(report_json(r));
  json j = {{"models", models},
            {"ranking", report.ranking},
            {"ranking_criterion", "mean sigma_error over VoidF1..VoidF4"},
            {"oracle_version", report.models.empty() ? std::string() : report.models.front().oracle_version}};
  return j.dump(2) + "\n";
}

void export_report(const ModelReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_json(report));
}

ModelReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return report_from_json(ss.str());
}

void export_comparison(const ComparisonReport& report, const std::filesystem::path& path) {
  write_text(path, comparison_to_json(report));
}

void export_samples(std::span<const data::Sample> samples, const std::filesystem::path& path,
                    const data::Metadata& metadata) {
  data::save_csv(path, samples, {.metadata = metadata, .flag_in_domain = true});
}

void export_errors(std::string_view model, std::span<const ErrorRecord> records,
                   const std::filesystem::path& path, const data::Metadata& metadata) {
  std::ostringstream out;
  if (!metadata.empty()) out << data::format_metadata(metadata) << '\n';
  out << "model,output_name,error\n";
  for (const auto& r : records) {
    for (std::size_t j = 0; j < data::kNumOutputs; ++j) {
      out << model << ',' << data::kColumnNames[data::kNumInputs + j] << ','
          << format_double(r.errors[j]) << '\n';
    }
  }
  write_text(path, out.str());
}

}  // namespace tabgen::validation
