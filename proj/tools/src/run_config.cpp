#include "tabgen_cli/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

#include "tabgen/error.hpp"
#include "tabgen/serialize.hpp"

namespace tabgen::cli {

namespace {

// Seeds get their own wrapper because std::uint64_t and std::size_t may be
// the same type.
struct SeedSlot {
  std::uint64_t* value;
};

using Slot = std::variant<std::size_t*, SeedSlot, double*, bool*, std::vector<std::size_t>*>;

// section -> key -> slot
using FieldTable = std::map<std::string, std::map<std::string, Slot>>;

void add_vae_fields(std::map<std::string, Slot>& s, vae::VaeConfig& c) {
  s["epochs"] = &c.epochs;
  s["batch_size"] = &c.batch_size;
  s["latent_dim"] = &c.latent_dim;
  s["hidden"] = &c.hidden;
  s["dropout"] = &c.dropout;
  s["batch_norm"] = &c.batch_norm;
  s["kl_weight"] = &c.kl_weight;
  s["learning_rate"] = &c.learning_rate;
  s["seed"] = SeedSlot{&c.seed};
}

FieldTable fields(RunConfig& c) {
  FieldTable t;
  t["dataset"] = {{"n", &c.dataset.n}, {"seed", SeedSlot{&c.dataset.seed}}};
  t["gan"] = {{"epochs", &c.gan.epochs},
              {"batch_size", &c.gan.batch_size},
              {"latent_dim", &c.gan.latent_dim},
              {"generator_hidden", &c.gan.generator_hidden},
              {"discriminator_hidden", &c.gan.discriminator_hidden},
              {"generator_learning_rate", &c.gan.generator_learning_rate},
              {"discriminator_learning_rate", &c.gan.discriminator_learning_rate},
              {"instance_noise", &c.gan.instance_noise},
              {"seed", SeedSlot{&c.gan.seed}}};
  t["nf"] = {{"epochs", &c.nf.epochs},
             {"layers", &c.nf.layers},
             {"hidden", &c.nf.hidden},
             {"learning_rate", &c.nf.learning_rate},
             {"noise_std", &c.nf.noise_std},
             {"seed", SeedSlot{&c.nf.seed}}};
  add_vae_fields(t["vae"], c.vae);
  add_vae_fields(t["cvae"], c.cvae);
  t["cvae"]["label_index"] = &c.cvae_label_index;
  t["generate"] = {{"n", &c.generate.n}, {"seed", SeedSlot{&c.generate.seed}}};
  return t;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_unsigned(const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError("expected a nonnegative integer, got '" + text + "'");
  return value;
}

struct Assign {
  const std::string& text;

  void operator()(std::size_t* p) const { *p = parse_unsigned<std::size_t>(text); }
  void operator()(SeedSlot p) const { *p.value = parse_unsigned<std::uint64_t>(text); }
  void operator()(double* p) const {
    try {
      *p = parse_double(text);
    } catch (const Error&) {
      throw UsageError("expected a number, got '" + text + "'");
    }
  }
  void operator()(bool* p) const {
    if (text == "true" || text == "1") {
      *p = true;
    } else if (text == "false" || text == "0") {
      *p = false;
    } else {
      throw UsageError("expected true or false, got '" + text + "'");
    }
  }
  void operator()(std::vector<std::size_t>* p) const {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_unsigned<std::size_t>(trim(item)));
    if (out.empty()) throw UsageError("expected a comma-separated list of widths");
    *p = std::move(out);
  }
};

struct Show {
  std::string operator()(const std::size_t* p) const { return std::to_string(*p); }
  std::string operator()(SeedSlot p) const { return std::to_string(*p.value); }
  std::string operator()(const double* p) const { return format_double(*p); }
  std::string operator()(const bool* p) const { return *p ? "true" : "false"; }
  std::string operator()(const std::vector<std::size_t>* p) const {
    std::string out;
    for (std::size_t i = 0; i < p->size(); ++i) out += (i ? "," : "") + std::to_string((*p)[i]);
    return out;
  }
};

}  // namespace

RunConfig parse_run_config(std::istream& in, RunConfig base) {
  auto table = fields(base);
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';') continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (text.front() == '[') {
      if (text.back() != ']') throw UsageError(where + "unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (!table.contains(section)) throw UsageError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw UsageError(where + "expected key = value");
    if (section.empty()) throw UsageError(where + "key outside of any section");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) throw UsageError(where + "unknown key '" + key + "' in [" + section + "]");
    try {
      std::visit(Assign{value}, it->second);
    } catch (const UsageError& e) {
      throw UsageError(where + section + "." + key + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  return parse_run_config(in);
}

std::string canonical_text(const RunConfig& config) {
  RunConfig copy = config;
  std::string out;
  for (const auto& [section, keys] : fields(copy)) {
    for (const auto& [key, slot] : keys) {
      out += section + "." + key + "=" + std::visit(Show{}, slot) + "\n";
    }
  }
  return out;
}

std::string config_digest(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tabgen::cli
