#include "actq/ingest.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace actq {

namespace {

constexpr char kMagic[4] = {'A', 'C', 'T', 'D'};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t remaining() const { return in_.size() - pos_; }

  std::uint64_t uint(int n, const std::string& what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const std::string& what) {
    need(n, what);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void need(std::size_t n, const std::string& what) const {
    if (remaining() < n) {
      throw FormatError(FormatError::Code::Truncated,
                        "truncated input: " + what + " needs " + std::to_string(n) +
                            " bytes, " + std::to_string(remaining()) + " left");
    }
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void check_unique(std::set<std::pair<std::string, TensorKind>>& seen, const LayerRecord& r) {
  if (r.name.empty()) throw FormatError(FormatError::Code::EmptyName, "record with empty name");
  if (!seen.emplace(r.name, r.kind).second) {
    throw FormatError(FormatError::Code::DuplicateName,
                      "duplicate record '" + r.name + "' (" +
                          (r.kind == TensorKind::Weight ? "weight" : "activation") + ")");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_actd(std::span<const LayerRecord> records) {
  if (records.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw FormatError(FormatError::Code::Io, "too many records");
  }
  ByteWriter w;
  w.bytes({kMagic, 4});
  w.u16(kActdVersion);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(records.size()));

  std::set<std::pair<std::string, TensorKind>> seen;
  for (const auto& r : records) {
    check_unique(seen, r);
    if (r.name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError(FormatError::Code::Io, "record name too long: " + r.name.substr(0, 32));
    }
    if (r.matrix.rows() > std::numeric_limits<std::uint32_t>::max() ||
        r.matrix.cols() > std::numeric_limits<std::uint32_t>::max()) {
      throw FormatError(FormatError::Code::Io, "record '" + r.name + "' is too large");
    }
    w.u16(static_cast<std::uint16_t>(r.name.size()));
    w.bytes(r.name);
    w.u8(static_cast<std::uint8_t>(r.dtype_stored));
    w.u8(static_cast<std::uint8_t>(r.kind));
    w.u32(static_cast<std::uint32_t>(r.matrix.rows()));
    w.u32(static_cast<std::uint32_t>(r.matrix.cols()));
    for (double v : r.matrix.data()) {
      if (r.dtype_stored == StoredDtype::F64) {
        w.u64(std::bit_cast<std::uint64_t>(v));
      } else {
        const float f = static_cast<float>(v);
        if (!std::isfinite(f)) {
          throw FormatError(FormatError::Code::NarrowingOverflow,
                            "record '" + r.name + "': value does not fit binary32");
        }
        w.u32(std::bit_cast<std::uint32_t>(f));
      }
    }
  }
  return w.take();
}

std::vector<LayerRecord> decode_actd(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.take(4, "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw FormatError(FormatError::Code::BadMagic, "bad magic: not an ACTD file");
  }
  const auto version = in.uint(2, "version");
  if (version != kActdVersion) {
    throw FormatError(FormatError::Code::UnsupportedVersion,
                      "unsupported ACTD version " + std::to_string(version));
  }
  const auto flags = in.uint(2, "flags");
  if (flags != 0) {
    throw FormatError(FormatError::Code::UnsupportedFlags,
                      "unsupported ACTD flags " + std::to_string(flags));
  }
  const auto count = in.uint(4, "record count");

  std::vector<LayerRecord> out;
  std::set<std::pair<std::string, TensorKind>> seen;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string where = "record " + std::to_string(i);
    const auto name_len = in.uint(2, where + " name length");
    const auto name_bytes = in.take(name_len, where + " name");
    std::string name(name_bytes.begin(), name_bytes.end());
    const std::string label = name.empty() ? where : "record '" + name + "'";

    const auto dtype = in.uint(1, label + " dtype");
    if (dtype > 1) throw FormatError(FormatError::Code::BadDtype, label + ": bad dtype " + std::to_string(dtype));
    const auto kind = in.uint(1, label + " kind");
    if (kind > 1) throw FormatError(FormatError::Code::BadKind, label + ": bad kind " + std::to_string(kind));
    const auto rows = in.uint(4, label + " rows");
    const auto cols = in.uint(4, label + " cols");
    if (rows == 0 || cols == 0) {
      throw FormatError(FormatError::Code::ZeroDimension, label + ": zero dimension");
    }

    const std::size_t width = dtype == 0 ? 4 : 8;
    const std::uint64_t values = rows * cols;  // both < 2^32, cannot overflow
    if (values > in.remaining() / width) {
      throw FormatError(FormatError::Code::Truncated,
                        label + ": truncated payload, declared " + std::to_string(values) +
                            " values but only " + std::to_string(in.remaining() / width) +
                            " present");
    }
    const auto payload = in.take(values * width, label + " payload");
    std::vector<double> data(values);
    for (std::size_t k = 0; k < values; ++k) {
      std::uint64_t bits = 0;
      for (std::size_t b = 0; b < width; ++b) bits |= std::uint64_t{payload[k * width + b]} << (8 * b);
      const double v = width == 4 ? static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(bits)))
                                  : std::bit_cast<double>(bits);
      if (!std::isfinite(v)) {
        throw FormatError(FormatError::Code::NonFinite,
                          label + ": non-finite value at index " + std::to_string(k));
      }
      data[k] = v;
    }

    LayerRecord rec{std::move(name), static_cast<TensorKind>(kind),
                    Matrix(rows, cols, std::move(data)), static_cast<StoredDtype>(dtype)};
    check_unique(seen, rec);
    out.push_back(std::move(rec));
  }
  if (in.remaining() != 0) {
    throw FormatError(FormatError::Code::TrailingBytes,
                      std::to_string(in.remaining()) + " trailing bytes after last record");
  }
  return out;
}

std::size_t write_actd(std::span<const LayerRecord> records, std::ostream& sink) {
  const auto bytes = encode_actd(records);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw FormatError(FormatError::Code::Io, "write failed");
  return bytes.size();
}

std::vector<LayerRecord> read_actd(std::istream& source) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  if (source.bad()) throw FormatError(FormatError::Code::Io, "read failed");
  return decode_actd(bytes);
}

void write_actd_file(std::span<const LayerRecord> records, const std::filesystem::path& path) {
  const auto bytes = encode_actd(records);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatError::Code::Io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatError::Code::Io, "write to " + path.string() + " failed");
}

std::vector<LayerRecord> read_actd_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatError::Code::Io, "cannot open " + path.string());
  return read_actd(in);
}

std::vector<LayerPair> pair_records(std::span<const LayerRecord> records) {
  std::vector<std::string> order;
  std::map<std::string, const LayerRecord*> acts, wts;
  for (const auto& r : records) {
    auto& slot = r.kind == TensorKind::Activation ? acts : wts;
    if (!acts.count(r.name) && !wts.count(r.name)) order.push_back(r.name);
    slot[r.name] = &r;
  }
  std::vector<LayerPair> out;
  for (const auto& name : order) {
    auto a = acts.find(name);
    auto w = wts.find(name);
    if (a == acts.end()) throw InvalidArgument("record '" + name + "' has no activation");
    if (w == wts.end()) throw InvalidArgument("record '" + name + "' has no weight");
    out.push_back({name, a->second->matrix, w->second->matrix});
  }
  return out;
}

}  // namespace actq
