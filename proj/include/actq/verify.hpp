#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace actq {

enum class VerifyLevel { Fast, Full };

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // residual or statistic the check compares
  double tolerance = 0.0;
  std::string detail;      // failure diagnostic, empty on success
};

/// Runs the built-in invariant checks: base table and constructed Hadamard
/// orthogonality, transform equivalence, quantizer optimality, centroid
/// clustering and the rotated-maximum predictions. With `hadamard_dir` the
/// base tables are read from that directory instead of the embedded copies.
std::vector<CheckResult> run_verification(VerifyLevel level,
                                          const std::optional<std::filesystem::path>& hadamard_dir = {});

}  // namespace actq
