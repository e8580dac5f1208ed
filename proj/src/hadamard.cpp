#include "actq/hadamard.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>

#include "actq/error.hpp"
#include "hadamard_assets.hpp"

namespace actq {

struct HadamardLibrary::Cache {
  std::mutex mutex;
  std::map<std::size_t, std::shared_ptr<const Matrix>> dense;
};

std::string hadamard_asset_name(std::size_t n) {
  return "hadamard_" + std::to_string(n) + ".txt";
}

SignMatrix parse_sign_matrix(std::string_view text, std::string_view asset) {
  std::vector<std::vector<std::int8_t>> rows;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream tokens(line);
    std::vector<std::int8_t> row;
    std::string tok;
    while (tokens >> tok) {
      if (tok == "+1" || tok == "1") {
        row.push_back(1);
      } else if (tok == "-1") {
        row.push_back(-1);
      } else {
        throw ComputationError(std::string(asset) + ": invalid token '" + tok + "' on row " +
                               std::to_string(rows.size()));
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw ComputationError(std::string(asset) + ": empty table");
  SignMatrix out{n, {}};
  out.data.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      throw ComputationError(std::string(asset) + ": row " + std::to_string(r) + " has " +
                             std::to_string(rows[r].size()) + " entries, expected " +
                             std::to_string(n));
    }
    out.data.insert(out.data.end(), rows[r].begin(), rows[r].end());
  }
  return out;
}

double hadamard_defect(const SignMatrix& h) {
  const auto n = static_cast<std::int64_t>(h.n);
  double acc = 0.0;
  for (std::size_t i = 0; i < h.n; ++i) {
    for (std::size_t j = 0; j < h.n; ++j) {
      std::int64_t dot = 0;
      for (std::size_t k = 0; k < h.n; ++k) dot += h(i, k) * h(j, k);
      const std::int64_t diff = dot - (i == j ? n : 0);
      acc += static_cast<double>(diff * diff);
    }
  }
  return std::sqrt(acc);
}

namespace {

void validate_table(std::size_t declared, const SignMatrix& h) {
  const std::string asset = hadamard_asset_name(declared);
  if (h.n != declared) {
    throw ComputationError(asset + ": table has order " + std::to_string(h.n));
  }
  const double defect = hadamard_defect(h);
  if (defect != 0.0) {
    std::ostringstream msg;
    msg << asset << ": not orthogonal, ||H H^T - n I||_F = " << defect;
    throw ComputationError(msg.str());
  }
}

// Sylvester sign of entry (r, c): (-1)^popcount(r & c).
int sylvester_sign(std::size_t r, std::size_t c) {
  return (std::popcount(r & c) & 1) ? -1 : 1;
}

// In-place Walsh-Hadamard butterfly over `count` elements spaced `stride`
// apart, starting at `v`.
void fwht_strided(double* v, std::size_t count, std::size_t stride) {
  for (std::size_t h = 1; h < count; h *= 2) {
    for (std::size_t i = 0; i < count; i += 2 * h) {
      for (std::size_t k = i; k < i + h; ++k) {
        const double a = v[k * stride];
        const double b = v[(k + h) * stride];
        v[k * stride] = a + b;
        v[(k + h) * stride] = a - b;
      }
    }
  }
}

}  // namespace

const HadamardLibrary& HadamardLibrary::builtin() {
  static const HadamardLibrary lib = [] {
    std::map<std::size_t, SignMatrix> tables;
    for (const auto& asset : detail::embedded_hadamard_assets()) {
      tables.emplace(asset.order, parse_sign_matrix(asset.text, hadamard_asset_name(asset.order)));
    }
    return from_tables(std::move(tables));
  }();
  return lib;
}

HadamardLibrary HadamardLibrary::from_directory(const std::filesystem::path& dir) {
  static const std::regex pattern(R"(hadamard_(\d+)\.txt)");
  std::map<std::size_t, SignMatrix> tables;
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw InvalidArgument("cannot read Hadamard asset directory " + dir.string());
  for (const auto& entry : it) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) continue;
    std::ifstream in(entry.path());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::size_t order = std::stoul(m[1].str());
    tables.emplace(order, parse_sign_matrix(buf.str(), name));
  }
  return from_tables(std::move(tables));
}

HadamardLibrary HadamardLibrary::from_tables(std::map<std::size_t, SignMatrix> tables) {
  for (const auto& [order, h] : tables) validate_table(order, h);
  HadamardLibrary lib;
  lib.tables_ = std::move(tables);
  lib.cache_ = std::make_shared<Cache>();
  return lib;
}

std::vector<std::size_t> HadamardLibrary::table_orders() const {
  std::vector<std::size_t> out;
  for (const auto& [order, h] : tables_) out.push_back(order);
  return out;
}

const SignMatrix* HadamardLibrary::table(std::size_t n) const {
  auto it = tables_.find(n);
  return it == tables_.end() ? nullptr : &it->second;
}

HadamardPlan HadamardLibrary::plan(std::size_t size) const {
  if (size == 0) throw UnsupportedSize("no known Hadamard decomposition for size 0");
  if (std::has_single_bit(size)) {
    HadamardPlan p{size, {}, size, 1};
    for (std::size_t n = size; n > 1; n /= 2) p.factors.push_back(2);
    return p;
  }
  for (const auto& [order, h] : tables_) {
    if (order < 2 || std::has_single_bit(order) || size % order != 0) continue;
    const std::size_t rest = size / order;
    if (!std::has_single_bit(rest)) continue;
    HadamardPlan p{size, {}, rest, order};
    if (rest > 1) p.factors.push_back(rest);
    p.factors.push_back(order);
    return p;
  }
  throw UnsupportedSize("no known Hadamard decomposition for size " + std::to_string(size));
}

int HadamardLibrary::sign(const HadamardPlan& plan, std::size_t r, std::size_t c) const {
  const std::size_t m = plan.table_order;
  const int s = sylvester_sign(r / m, c / m);
  if (m == 1) return s;
  return s * (*table(m))(r % m, c % m);
}

std::shared_ptr<const Matrix> HadamardLibrary::matrix(std::size_t size) const {
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->dense.find(size);
    if (it != cache_->dense.end()) return it->second;
  }
  const HadamardPlan p = plan(size);
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  std::vector<double> d(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) d[r * size + c] = sign(p, r, c) * scale;
  }
  auto built = std::make_shared<const Matrix>(size, size, std::move(d));
  std::lock_guard lock(cache_->mutex);
  return cache_->dense.emplace(size, std::move(built)).first->second;
}

Matrix HadamardLibrary::multiply_rows(const Matrix& m) const {
  const HadamardPlan p = plan(m.cols());
  const std::size_t blocks = p.sylvester_order;
  const std::size_t order = p.table_order;
  const SignMatrix* base = order > 1 ? table(order) : nullptr;
  const double scale = 1.0 / std::sqrt(static_cast<double>(p.size));

  std::vector<double> out(m.size());
  std::vector<double> tmp(order);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.row(r);
    double* dst = out.data() + r * m.cols();
    // Row viewed as a (blocks x order) matrix M; result is S^T M H with S
    // the Sylvester block (symmetric) and H the base table.
    if (base == nullptr) {
      std::copy(src.begin(), src.end(), dst);
    } else {
      for (std::size_t b = 0; b < blocks; ++b) {
        std::fill(tmp.begin(), tmp.end(), 0.0);
        for (std::size_t k = 0; k < order; ++k) {
          const double v = src[b * order + k];
          if (v == 0.0) continue;
          for (std::size_t l = 0; l < order; ++l) tmp[l] += v * (*base)(k, l);
        }
        std::copy(tmp.begin(), tmp.end(), dst + b * order);
      }
    }
    if (blocks > 1) {
      for (std::size_t l = 0; l < order; ++l) fwht_strided(dst + l, blocks, order);
    }
    for (std::size_t i = 0; i < m.cols(); ++i) dst[i] *= scale;
  }
  return Matrix(m.rows(), m.cols(), std::move(out));
}

Matrix hadamard(std::size_t size) { return *HadamardLibrary::builtin().matrix(size); }

HadamardPlan hadamard_plan(std::size_t size) { return HadamardLibrary::builtin().plan(size); }

}  // namespace actq
