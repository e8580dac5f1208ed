#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "actq/tensor.hpp"

namespace actq {

/// Square matrix of +1/-1 entries (an unnormalized Hadamard candidate).
struct SignMatrix {
  std::size_t n = 0;
  std::vector<std::int8_t> data;

  int operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
};

/// Parses rows of whitespace-separated "+1"/"-1" (or "1") tokens. `asset`
/// names the source in diagnostics. Only the shape and alphabet are checked.
SignMatrix parse_sign_matrix(std::string_view text, std::string_view asset);

/// ||H H^T - n I||_F computed in exact integer arithmetic; 0 for a valid
/// Hadamard matrix.
double hadamard_defect(const SignMatrix& h);

/// How a Hadamard matrix of `size` is assembled. Powers of two are pure
/// Sylvester products (factors [2, 2, ...]); other sizes are a Sylvester
/// block followed by one base-table matrix, in Kronecker order, e.g.
/// 11008 -> [64, 172] means R_64 (x) R_172.
struct HadamardPlan {
  std::size_t size = 0;
  std::vector<std::size_t> factors;
  std::size_t sylvester_order = 1;  // power-of-two part
  std::size_t table_order = 1;      // base-table part, 1 if none
};

/// File name of a base table asset, `hadamard_<n>.txt`.
std::string hadamard_asset_name(std::size_t n);

/// Base Hadamard tables plus the constructions built on them. Copies share a
/// thread-safe cache of dense matrices.
class HadamardLibrary {
 public:
  /// Tables compiled into the binary (orders 12, 20, 28, 172). Validated on
  /// first use; a corrupted table raises ComputationError naming the asset.
  static const HadamardLibrary& builtin();

  /// Loads every `hadamard_<n>.txt` in `dir` and validates each one.
  static HadamardLibrary from_directory(const std::filesystem::path& dir);

  /// Builds a library from already-parsed tables, validating each one.
  static HadamardLibrary from_tables(std::map<std::size_t, SignMatrix> tables);

  std::vector<std::size_t> table_orders() const;
  const SignMatrix* table(std::size_t n) const;

  /// Throws UnsupportedSize when no decomposition exists.
  HadamardPlan plan(std::size_t size) const;

  /// Sign of entry (r, c) of the unnormalized matrix for `plan`.
  int sign(const HadamardPlan& plan, std::size_t r, std::size_t c) const;

  /// Dense normalized matrix, every entry exactly +-1/sqrt(size). Memoized.
  std::shared_ptr<const Matrix> matrix(std::size_t size) const;

  /// m * R for the normalized Hadamard matrix of order m.cols(), without
  /// forming R. Uses a fast Walsh-Hadamard butterfly for the Sylvester part.
  Matrix multiply_rows(const Matrix& m) const;

 private:
  struct Cache;

  std::map<std::size_t, SignMatrix> tables_;
  std::shared_ptr<Cache> cache_;
};

/// Normalized Hadamard matrix of the given order from the builtin library.
Matrix hadamard(std::size_t size);
HadamardPlan hadamard_plan(std::size_t size);

}  // namespace actq
