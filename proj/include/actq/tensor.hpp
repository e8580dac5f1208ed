#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace actq {

/// Dense row-major matrix of doubles. Rows are tokens (or input channels for
/// weights), columns are channels. Immutable once constructed; every entry is
/// finite.
class Matrix {
 public:
  /// Takes ownership of `data`; throws ShapeError when the size does not
  /// match or a dimension is zero, InvalidArgument on a non-finite entry.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix zeros(std::size_t rows, std::size_t cols);
  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  /// Single-row matrix holding `values`.
  static Matrix row_vector(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  /// Entries of column `c`, copied out.
  std::vector<double> column(std::size_t c) const;

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& m, double factor);

double frobenius_norm(const Matrix& m);
double squared_frobenius_norm(const Matrix& m);

/// Euclidean norm of every column (the per-channel magnitude across tokens).
std::vector<double> channel_magnitudes(const Matrix& m);

/// Block Kronecker product: result[i*rows(b)+k, j*cols(b)+l] = a[i,j] * b[k,l].
Matrix kronecker(const Matrix& a, const Matrix& b);

/// Largest absolute entry.
double max_abs(const Matrix& m);

/// Largest absolute entry of every column / row.
std::vector<double> column_max_abs(const Matrix& m);
std::vector<double> row_max_abs(const Matrix& m);

}  // namespace actq
