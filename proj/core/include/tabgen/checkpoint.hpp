#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "tabgen/cvae.hpp"
#include "tabgen/gan.hpp"
#include "tabgen/realnvp.hpp"
#include "tabgen/standardizer.hpp"
#include "tabgen/vae.hpp"

namespace tabgen {

inline constexpr std::string_view kCheckpointMagic = "TABGEN-CKPT v1";

enum class ModelKind { Gan, Nf, Vae, Cvae };

std::string_view to_string(ModelKind kind);
/// Throws UsageError listing the valid names.
ModelKind parse_model_kind(std::string_view name);

using AnyModel = std::variant<gan::GanModel, flow::FlowStack, vae::VaeModel, cvae::CvaeModel>;

/// A trained model together with the standardizer of its training data and
/// provenance needed to regenerate and audit results.
struct Checkpoint {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string oracle_version{data::kOracleVersion};
  data::Standardizer standardizer;
  AnyModel model;

  ModelKind kind() const { return static_cast<ModelKind>(model.index()); }
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
/// Parse failures are rethrown as SchemaError including whatever header
/// fields were read before the failure.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tabgen
