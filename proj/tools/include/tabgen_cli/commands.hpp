#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabgen/checkpoint.hpp"
#include "tabgen_cli/run_config.hpp"

namespace tabgen::cli {

namespace fs = std::filesystem;

/// Where a command writes and how chatty it is. Console output is the
/// command's result summary; `log` receives progress messages only when
/// verbose.
struct Context {
  RunConfig config;
  fs::path out_dir = ".";
  std::ostream* console = nullptr;
  std::ostream* log = nullptr;
};

/// Level from TABGEN_LOG: 0 = quiet, 1 = info (default), 2 = debug.
int log_level_from_env();

struct MakeDataOutputs {
  fs::path data;
};

MakeDataOutputs cmd_make_data(const Context& ctx);

struct TrainOutputs {
  fs::path checkpoint;
  fs::path training_log;
};

TrainOutputs cmd_train(const Context& ctx, ModelKind model, const fs::path& data);

struct GenerateOutputs {
  fs::path samples;
  std::size_t generated = 0;
  std::size_t in_domain = 0;
};

/// `labels` (CVAE only) holds one raw P1008 value per line and fixes the
/// number of samples.
GenerateOutputs cmd_generate(const Context& ctx, const fs::path& checkpoint,
                             const std::optional<fs::path>& labels = std::nullopt);

struct ValidateOutputs {
  fs::path report;
  fs::path errors;
};

/// `checkpoint`, when given, must belong to the same model and oracle as the
/// samples.
ValidateOutputs cmd_validate(const Context& ctx, const fs::path& samples,
                             const std::optional<fs::path>& checkpoint = std::nullopt);

fs::path cmd_compare(const Context& ctx, std::span<const fs::path> reports);

/// File names used inside the output directory.
fs::path data_file(const fs::path& dir);
fs::path checkpoint_file(const fs::path& dir, ModelKind model);
fs::path training_log_file(const fs::path& dir, ModelKind model);
fs::path samples_file(const fs::path& dir, std::string_view model);
fs::path report_file(const fs::path& dir, std::string_view model);
fs::path errors_file(const fs::path& dir, std::string_view model);
fs::path comparison_file(const fs::path& dir);

std::vector<double> read_labels(const fs::path& path);

}  // namespace tabgen::cli
