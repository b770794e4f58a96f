#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabgen/dataset.hpp"

namespace tabgen::data {

/// Name of the optional boolean column written next to generated samples.
inline constexpr std::string_view kInDomainColumn = "in_domain";

/// Leading `# key=value ...` lines carry provenance (config digest, seed,
/// model). Readers skip every line starting with '#'.
using Metadata = std::map<std::string, std::string>;

struct CsvTable {
  std::vector<Sample> samples;
  Metadata metadata;
  /// Present only when the file has an `in_domain` column.
  std::optional<std::vector<bool>> in_domain;
};

struct CsvWriteOptions {
  Metadata metadata;
  bool flag_in_domain = false;
};

/// Columns are matched by header name and may appear in any order. Missing or
/// unknown columns, non-numeric cells and wrong arity raise SchemaError with
/// the 1-based line and column.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);
std::vector<Sample> load_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, std::span<const Sample> samples,
               const CsvWriteOptions& options = {});
void save_csv(const std::filesystem::path& path, std::span<const Sample> samples,
              const CsvWriteOptions& options = {});

std::string format_metadata(const Metadata& metadata);
/// Parses the whitespace-separated key=value pairs of one comment line.
void parse_metadata_line(std::string_view line, Metadata& into);

}  // namespace tabgen::data
