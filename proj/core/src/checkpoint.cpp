#include "tabgen/checkpoint.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tabgen/error.hpp"
#include "tabgen/serialize.hpp"

namespace tabgen {

static_assert(std::is_same_v<std::variant_alternative_t<0, AnyModel>, gan::GanModel>);
static_assert(std::is_same_v<std::variant_alternative_t<3, AnyModel>, cvae::CvaeModel>);

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gan:
      return "gan";
    case ModelKind::Nf:
      return "nf";
    case ModelKind::Vae:
      return "vae";
    case ModelKind::Cvae:
      return "cvae";
  }
  return "gan";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "gan") return ModelKind::Gan;
  if (name == "nf") return ModelKind::Nf;
  if (name == "vae") return ModelKind::Vae;
  if (name == "cvae") return ModelKind::Cvae;
  throw UsageError("unknown model '" + std::string(name) + "'; valid models: gan, nf, vae, cvae");
}

namespace {

void write_named(std::ostream& out, std::string_view name, const nn::DenseNetwork& net) {
  out << "network " << name << '\n';
  write_network(out, net);
}

nn::DenseNetwork read_named(TokenReader& in, std::string_view name) {
  in.expect("network");
  in.expect(name);
  return read_network(in);
}

struct BodyWriter {
  std::ostream& out;

  void operator()(const gan::GanModel& m) const {
    out << "latent_dim " << m.latent_dim << '\n';
    write_named(out, "generator", m.generator);
    write_named(out, "discriminator", m.discriminator);
  }
  void operator()(const flow::FlowStack& s) const {
    out << "coupling_layers " << s.layers.size() << '\n';
    for (const auto& layer : s.layers) {
      out << "mask " << layer.mask.size();
      for (bool b : layer.mask) out << ' ' << (b ? 1 : 0);
      out << '\n';
      write_named(out, "s", layer.s_net);
      write_named(out, "t", layer.t_net);
    }
  }
  void operator()(const vae::VaeModel& m) const {
    out << "latent_dim " << m.latent_dim << '\n';
    write_named(out, "encoder", m.encoder);
    write_named(out, "decoder", m.decoder);
  }
  void operator()(const cvae::CvaeModel& m) const {
    out << "latent_dim " << m.latent_dim << '\n';
    out << "label_index " << m.label_index << '\n';
    write_named(out, "encoder", m.encoder);
    write_named(out, "decoder", m.decoder);
  }
};

AnyModel read_body(TokenReader& in, ModelKind kind) {
  switch (kind) {
    case ModelKind::Gan: {
      gan::GanModel m;
      in.expect("latent_dim");
      m.latent_dim = in.count();
      m.generator = read_named(in, "generator");
      m.discriminator = read_named(in, "discriminator");
      if (m.generator.inputs() != m.latent_dim || m.discriminator.inputs() != m.generator.outputs()) {
        throw Error("GAN network shapes are inconsistent");
      }
      return m;
    }
    case ModelKind::Nf: {
      flow::FlowStack s;
      in.expect("coupling_layers");
      const std::size_t n = in.count();
      for (std::size_t k = 0; k < n; ++k) {
        flow::CouplingLayer layer;
        in.expect("mask");
        const std::size_t dim = in.count();
        for (std::size_t i = 0; i < dim; ++i) layer.mask.push_back(in.count() != 0);
        layer.s_net = read_named(in, "s");
        layer.t_net = read_named(in, "t");
        const auto d = layer.pass_indices().size();
        if (layer.s_net.inputs() != d || layer.t_net.inputs() != d ||
            layer.s_net.outputs() != layer.dim() - d || layer.t_net.outputs() != layer.dim() - d) {
          throw Error("coupling layer " + std::to_string(k) + " networks do not match its mask");
        }
        s.layers.push_back(std::move(layer));
      }
      return s;
    }
    case ModelKind::Vae: {
      vae::VaeModel m;
      in.expect("latent_dim");
      m.latent_dim = in.count();
      m.encoder = read_named(in, "encoder");
      m.decoder = read_named(in, "decoder");
      if (m.encoder.outputs() != 2 * m.latent_dim || m.decoder.inputs() != m.latent_dim) {
        throw Error("VAE network shapes are inconsistent");
      }
      return m;
    }
    case ModelKind::Cvae: {
      cvae::CvaeModel m;
      in.expect("latent_dim");
      m.latent_dim = in.count();
      in.expect("label_index");
      m.label_index = in.count();
      m.encoder = read_named(in, "encoder");
      m.decoder = read_named(in, "decoder");
      if (m.encoder.outputs() != 2 * m.latent_dim || m.decoder.inputs() != m.latent_dim + 1 ||
          m.label_index >= m.decoder.outputs()) {
        throw Error("CVAE network shapes are inconsistent");
      }
      return m;
    }
  }
  throw Error("unreachable model kind");
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out << kCheckpointMagic << '\n';
  out << "model " << to_string(ckpt.kind()) << '\n';
  out << "seed " << ckpt.seed << '\n';
  out << "config_digest " << (ckpt.config_digest.empty() ? "-" : ckpt.config_digest) << '\n';
  out << "oracle_version " << ckpt.oracle_version << '\n';
  write_numbers(out, "standardizer_mean", ckpt.standardizer.means());
  write_numbers(out, "standardizer_std", ckpt.standardizer.stds());
  std::visit(BodyWriter{out}, ckpt.model);
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  TokenReader reader(in);
  std::string seen = "none";
  try {
    std::string magic = reader.next();
    magic += " " + reader.next();
    if (magic != kCheckpointMagic) {
      throw Error("bad magic '" + magic + "', expected '" + std::string(kCheckpointMagic) + "'");
    }
    seen = "magic ok";
    reader.expect("model");
    const std::string model_name = reader.next();
    const ModelKind kind = parse_model_kind(model_name);
    seen += ", model=" + model_name;

    Checkpoint ckpt;
    reader.expect("seed");
    ckpt.seed = static_cast<std::uint64_t>(std::stoull(reader.next()));
    reader.expect("config_digest");
    ckpt.config_digest = reader.next();
    if (ckpt.config_digest == "-") ckpt.config_digest.clear();
    reader.expect("oracle_version");
    ckpt.oracle_version = reader.next();
    seen += ", seed=" + std::to_string(ckpt.seed) + ", oracle_version=" + ckpt.oracle_version;

    std::array<double, data::kSampleDim> mean{};
    std::array<double, data::kSampleDim> sd{};
    reader.expect("standardizer_mean");
    for (double& v : mean) v = reader.number();
    reader.expect("standardizer_std");
    for (double& v : sd) v = reader.number();
    ckpt.standardizer = data::Standardizer(mean, sd);

    ckpt.model = read_body(reader, kind);
    reader.expect("end");
    return ckpt;
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(std::string("corrupt checkpoint (") + seen + "): " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, ckpt);
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace tabgen
