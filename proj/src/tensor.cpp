#include "actq/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "actq/error.hpp"

namespace actq {

namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows_ == 0 || cols_ == 0) {
    throw ShapeError("matrix dimensions must be positive, got " + dims(rows_, cols_));
  }
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix " + dims(rows_, cols_) + " needs " + std::to_string(rows_ * cols_) +
                     " entries, got " + std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw InvalidArgument("non-finite matrix entry at (" + std::to_string(i / cols_) + ", " +
                            std::to_string(i % cols_) + ")");
    }
  }
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Matrix Matrix::identity(std::size_t n) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
  return Matrix(n, n, std::move(d));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> d;
  d.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("ragged row list");
    d.insert(d.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(d));
}

Matrix Matrix::row_vector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = data_[r * cols_ + c];
  return out;
}

Matrix Matrix::transposed() const {
  std::vector<double> d(data_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) d[c * rows_ + r] = data_[r * cols_ + c];
  }
  return Matrix(cols_, rows_, std::move(d));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + dims(a.rows(), a.cols()) + " x " + dims(b.rows(), b.cols()));
  }
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  std::vector<double> out(n * m, 0.0);
  const auto bd = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    double* orow = out.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      const double* brow = bd.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aip * brow[j];
    }
  }
  return Matrix(n, m, std::move(out));
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("subtract: " + dims(a.rows(), a.cols()) + " vs " + dims(b.rows(), b.cols()));
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] - b.data()[i];
  return Matrix(a.rows(), a.cols(), std::move(d));
}

Matrix scaled(const Matrix& m, double factor) {
  std::vector<double> d(m.data().begin(), m.data().end());
  for (double& v : d) v *= factor;
  return Matrix(m.rows(), m.cols(), std::move(d));
}

double squared_frobenius_norm(const Matrix& m) {
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return acc;
}

double frobenius_norm(const Matrix& m) { return std::sqrt(squared_frobenius_norm(m)); }

std::vector<double> channel_magnitudes(const Matrix& m) {
  std::vector<double> acc(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) acc[c] += row[c] * row[c];
  }
  for (double& v : acc) v = std::sqrt(v);
  return acc;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  std::vector<double> d(rows * cols);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k) {
        double* dst = d.data() + (i * b.rows() + k) * cols + j * b.cols();
        for (std::size_t l = 0; l < b.cols(); ++l) dst[l] = aij * b(k, l);
      }
    }
  }
  return Matrix(rows, cols, std::move(d));
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

std::vector<double> column_max_abs(const Matrix& m) {
  std::vector<double> out(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out[c] = std::max(out[c], std::abs(row[c]));
  }
  return out;
}

std::vector<double> row_max_abs(const Matrix& m) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (double v : m.row(r)) out[r] = std::max(out[r], std::abs(v));
  }
  return out;
}

}  // namespace actq
