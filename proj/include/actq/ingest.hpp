#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "actq/error.hpp"
#include "actq/metrics.hpp"
#include "actq/tensor.hpp"

namespace actq {

// ACTD v1, all integers little-endian:
//   "ACTD" | u16 version=1 | u16 flags=0 | u32 record_count
//   per record: u16 name_len | name | u8 dtype | u8 kind | u32 rows | u32 cols
//               | rows*cols values (binary32 or binary64), row-major

enum class TensorKind : std::uint8_t { Activation = 0, Weight = 1 };
enum class StoredDtype : std::uint8_t { F32 = 0, F64 = 1 };

inline constexpr std::uint16_t kActdVersion = 1;
inline constexpr std::size_t kActdHeaderBytes = 12;

struct LayerRecord {
  std::string name;  // e.g. "layer.30.down_proj"
  TensorKind kind = TensorKind::Activation;
  Matrix matrix;
  StoredDtype dtype_stored = StoredDtype::F64;
};

class FormatError : public Error {
 public:
  enum class Code {
    BadMagic,
    UnsupportedVersion,
    UnsupportedFlags,
    Truncated,
    BadDtype,
    BadKind,
    EmptyName,
    ZeroDimension,
    NonFinite,
    DuplicateName,
    TrailingBytes,
    NarrowingOverflow,
    Io,
  };

  FormatError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

/// Canonical serialization. Throws FormatError on duplicate (name, kind), an
/// empty name, or an F64 value that does not fit binary32 when F32 storage is
/// requested.
std::vector<std::uint8_t> encode_actd(std::span<const LayerRecord> records);

/// Parses and validates a complete ACTD image. Stored binary32 values are
/// widened to double. Every malformed input raises FormatError.
std::vector<LayerRecord> decode_actd(std::span<const std::uint8_t> bytes);

/// Writes to `sink` and returns the byte count.
std::size_t write_actd(std::span<const LayerRecord> records, std::ostream& sink);
/// Reads `source` to the end and decodes it.
std::vector<LayerRecord> read_actd(std::istream& source);

void write_actd_file(std::span<const LayerRecord> records, const std::filesystem::path& path);
std::vector<LayerRecord> read_actd_file(const std::filesystem::path& path);

/// Joins Activation and Weight records sharing a name, in order of first
/// appearance. Throws InvalidArgument when a name lacks its partner.
std::vector<LayerPair> pair_records(std::span<const LayerRecord> records);

}  // namespace actq
