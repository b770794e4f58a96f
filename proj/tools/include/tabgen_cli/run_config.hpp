#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "tabgen/cvae.hpp"
#include "tabgen/gan.hpp"
#include "tabgen/realnvp.hpp"
#include "tabgen/vae.hpp"

namespace tabgen::cli {

struct DatasetSection {
  std::size_t n = 200;
  std::uint64_t seed = 42;
};

struct GenerateSection {
  std::size_t n = 500;
  std::uint64_t seed = 7;
};

/// Effective configuration of one invocation. Files are INI-like:
///
///   [vae]
///   epochs = 3000
///   hidden = 64,64,64
///
/// Blank lines and lines starting with '#' or ';' are ignored. Unknown
/// sections or keys are rejected with the offending line number.
struct RunConfig {
  DatasetSection dataset;
  gan::GanConfig gan;
  flow::NfConfig nf;
  vae::VaeConfig vae;
  cvae::CvaeConfig cvae;
  std::size_t cvae_label_index = 0;
  GenerateSection generate;
};

/// Applies the entries of `in` on top of `base`. Throws UsageError.
RunConfig parse_run_config(std::istream& in, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Every key of every section as sorted `section.key=value` lines.
std::string canonical_text(const RunConfig& config);
/// 16 hex digits of FNV-1a over canonical_text.
std::string config_digest(const RunConfig& config);

}  // namespace tabgen::cli
