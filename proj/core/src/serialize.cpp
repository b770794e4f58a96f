#include "tabgen/serialize.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "tabgen/error.hpp"

namespace tabgen {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("failed to format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  // from_chars rejects a leading '+', which some writers emit.
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw Error("'" + std::string(text) + "' is not a number");
  }
  return value;
}

std::string TokenReader::next() {
  std::string token;
  if (!(in_ >> token)) throw Error("unexpected end of input");
  return token;
}

void TokenReader::expect(std::string_view keyword) {
  const std::string token = next();
  if (token != keyword) {
    throw Error("expected '" + std::string(keyword) + "', found '" + token + "'");
  }
}

double TokenReader::number() { return parse_double(next()); }

std::size_t TokenReader::count() {
  const std::string token = next();
  std::size_t value = 0;
  auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || end != token.data() + token.size()) {
    throw Error("'" + token + "' is not a count");
  }
  return value;
}

std::vector<double> TokenReader::numbers(std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = number();
  return out;
}

void write_numbers(std::ostream& out, std::string_view key, std::span<const double> values) {
  out << key;
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

void write_network(std::ostream& out, const nn::DenseNetwork& net) {
  out << kNetworkMagic << '\n';
  out << "layers " << net.depth() << '\n';
  for (const auto& layer : net.layers()) {
    out << "layer " << layer.inputs() << ' ' << layer.outputs() << ' '
        << nn::to_string(layer.activation) << ' ' << (layer.norm ? 1 : 0) << ' '
        << format_double(layer.dropout) << '\n';
    write_numbers(out, "weights", layer.weights.data());
    write_numbers(out, "bias", layer.bias);
    if (layer.norm) {
      write_numbers(out, "gamma", layer.norm->gamma);
      write_numbers(out, "beta", layer.norm->beta);
      write_numbers(out, "running_mean", layer.norm->running_mean);
      write_numbers(out, "running_var", layer.norm->running_var);
    }
  }
}

nn::DenseNetwork read_network(TokenReader& in) {
  std::string magic = in.next();
  magic += " " + in.next();
  if (magic != kNetworkMagic) {
    throw Error("bad network header '" + magic + "', expected '" + std::string(kNetworkMagic) + "'");
  }
  in.expect("layers");
  const std::size_t depth = in.count();
  std::vector<nn::DenseLayer> layers;
  for (std::size_t k = 0; k < depth; ++k) {
    in.expect("layer");
    const std::size_t inputs = in.count();
    const std::size_t outputs = in.count();
    nn::DenseLayer layer;
    layer.activation = nn::parse_activation(in.next());
    const std::size_t has_norm = in.count();
    layer.dropout = in.number();
    in.expect("weights");
    layer.weights = nn::Matrix(outputs, inputs, in.numbers(inputs * outputs));
    in.expect("bias");
    layer.bias = in.numbers(outputs);
    if (has_norm != 0) {
      nn::BatchNorm bn(outputs);
      in.expect("gamma");
      bn.gamma = in.numbers(outputs);
      in.expect("beta");
      bn.beta = in.numbers(outputs);
      in.expect("running_mean");
      bn.running_mean = in.numbers(outputs);
      in.expect("running_var");
      bn.running_var = in.numbers(outputs);
      layer.norm = std::move(bn);
    }
    layers.push_back(std::move(layer));
  }
  return nn::DenseNetwork(std::move(layers));
}

}  // namespace tabgen
