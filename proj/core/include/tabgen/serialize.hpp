#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabgen/network.hpp"

namespace tabgen {

inline constexpr std::string_view kNetworkMagic = "TABGEN-NET v1";

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);
/// Strict parse: the whole string must be a finite or infinite number.
double parse_double(std::string_view text);

/// Whitespace-separated token stream with keyword expectations, used for the
/// checkpoint and network text formats.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string next();
  void expect(std::string_view keyword);
  double number();
  std::size_t count();
  std::vector<double> numbers(std::size_t n);

 private:
  std::istream& in_;
};

void write_numbers(std::ostream& out, std::string_view key, std::span<const double> values);

/// Layer shapes, activations, normalisation state and parameters, preceded by
/// the magic line.
void write_network(std::ostream& out, const nn::DenseNetwork& net);
nn::DenseNetwork read_network(TokenReader& in);

}  // namespace tabgen
