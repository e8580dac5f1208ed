#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "actq/metrics.hpp"
#include "actq/transform.hpp"
#include "actq/verify.hpp"

namespace actq::cli {

// Stable process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitCompute = 2;

struct AnalyzeOptions {
  std::optional<std::filesystem::path> input;  // ACTD file
  std::optional<std::string> suite;            // or a synthetic suite, generated in memory
  std::uint64_t seed = 0;                      // for `suite`
  int bits_act = 4;
  int bits_wt = 4;
  std::vector<TransformKind> transforms{TransformKind::None};
  double alpha = kDefaultAlpha;
  std::vector<AlphaOverride> alpha_for;
  std::vector<std::string> exclude;
  std::filesystem::path report;
  std::optional<std::filesystem::path> charts;
  unsigned threads = 0;
};

/// Parses "none,smooth,rotate,smooth-rotate".
std::vector<TransformKind> parse_transform_list(const std::string& list);

/// Parses "PREFIX=ALPHA".
AlphaOverride parse_alpha_override(const std::string& text);

int run_synth(const std::string& suite, std::uint64_t seed, const std::filesystem::path& out,
              std::ostream& log, std::ostream& err);

/// Writes the CSV report (and charts), prints a correlation summary of
/// layer_error against act_difficulty^2 per transform to `log`.
int run_analyze(const AnalyzeOptions& options, std::ostream& log, std::ostream& err);

int run_verify(VerifyLevel level, const std::optional<std::filesystem::path>& hadamard_dir,
               std::ostream& log);

int run_hadamard(std::size_t size, bool check, bool print,
                 const std::optional<std::filesystem::path>& hadamard_dir, std::ostream& log,
                 std::ostream& err);

/// Full command-line entry point (argument parsing included).
int main(int argc, char** argv);

}  // namespace actq::cli
