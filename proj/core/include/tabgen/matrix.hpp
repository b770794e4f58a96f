#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace tabgen::nn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Batches are stored one sample per row.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// One-row matrix holding `values`.
  static Matrix row_vector(std::span<const double> values);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Copies the given rows, in order, into a new matrix.
  Matrix gather_rows(std::span<const std::size_t> indices) const;
  /// Copies columns [first, first + count).
  Matrix columns(std::size_t first, std::size_t count) const;
  /// Copies the listed columns, in order.
  Matrix columns(std::span<const std::size_t> indices) const;
  /// Horizontal concatenation; both operands must have equal row counts.
  Matrix hconcat(const Matrix& right) const;

  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace tabgen::nn
