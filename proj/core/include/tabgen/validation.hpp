#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabgen/csv.hpp"
#include "tabgen/dataset.hpp"
#include "tabgen/matrix.hpp"
#include "tabgen/standardizer.hpp"

namespace tabgen::validation {

inline constexpr std::array<std::string_view, data::kNumOutputs> kOutputKeys = {
    "voidf1", "voidf2", "voidf3", "voidf4"};

/// Model names in the order they are reported.
inline constexpr std::array<std::string_view, 4> kModelNames = {"gan", "nf", "vae", "cvae"};

struct OutputError {
  double mu = 0.0;     // mean of generated - oracle
  double sigma = 0.0;  // population standard deviation of the same
};

struct ErrorStats {
  std::array<OutputError, data::kNumOutputs> outputs{};
  std::size_t n_validated = 0;

  double mean_sigma() const;
};

/// Errors (generated - oracle) of one in-domain sample.
struct ErrorRecord {
  std::size_t sample_index = 0;  // position in the generated batch
  std::array<double, data::kNumOutputs> errors{};
};

struct ValidationResult {
  ErrorStats stats;
  std::vector<ErrorRecord> records;
  std::size_t generated_count = 0;
  std::size_t in_domain_count = 0;
};

/// Destandardizes, drops samples outside the training domain, evaluates the
/// oracle at the remaining PMPs and aggregates per-output error moments.
/// Throws if no sample is in domain.
ValidationResult validate(const nn::Matrix& standardized, const data::Standardizer& standardizer);
/// Same protocol for samples already in raw units.
ValidationResult validate_samples(std::span<const data::Sample> samples);

ErrorStats error_statistics(std::span<const ErrorRecord> records);

struct ModelReport {
  std::string model;
  std::size_t generated_count = 0;
  std::size_t in_domain_count = 0;
  ErrorStats errors;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string oracle_version{data::kOracleVersion};
};

ModelReport make_report(std::string model, const ValidationResult& result, std::uint64_t seed,
                        std::string config_digest);

struct ComparisonReport {
  std::vector<ModelReport> models;  // in kModelNames order
  std::vector<std::string> ranking; // ascending mean sigma_error
};

/// Requires exactly one report for each of gan, nf, vae and cvae, all under
/// the same oracle version.
ComparisonReport compare_models(std::span<const ModelReport> reports);

std::string report_to_json(const ModelReport& report);
ModelReport report_from_json(std::string_view text);
std::string comparison_to_json(const ComparisonReport& report);

void export_report(const ModelReport& report, const std::filesystem::path& path);
ModelReport load_report(const std::filesystem::path& path);
void export_comparison(const ComparisonReport& report, const std::filesystem::path& path);

/// Generated samples in the dataset CSV schema plus the in_domain flag.
void export_samples(std::span<const data::Sample> samples, const std::filesystem::path& path,
                    const data::Metadata& metadata = {});

/// Long-format error table: model,output_name,error (one row per output per
/// validated sample).
void export_errors(std::string_view model, std::span<const ErrorRecord> records,
                   const std::filesystem::path& path, const data::Metadata& metadata = {});

}  // namespace tabgen::validation
