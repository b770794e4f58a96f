#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tabgen {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or arity mismatch. `layer` is set when the mismatch is attributable
/// to one layer of a network.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what,
                          std::optional<std::size_t> layer = std::nullopt)
      : Error(what), layer_(layer) {}

  std::optional<std::size_t> layer() const { return layer_; }

 private:
  std::optional<std::size_t> layer_;
};

/// NaN/Inf detected. Training loops attach the epoch at which it happened.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what,
                          std::optional<std::size_t> epoch = std::nullopt)
      : Error(what), epoch_(epoch) {}

  std::optional<std::size_t> epoch() const { return epoch_; }

 private:
  std::optional<std::size_t> epoch_;
};

/// Malformed tabular input. Rows are 1-based file lines, columns 1-based.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::size_t row = 0,
              std::size_t column = 0)
      : Error(what), row_(row), column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tabgen
