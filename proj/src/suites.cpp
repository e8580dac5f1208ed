#include "actq/suites.hpp"

#include "actq/error.hpp"
#include "actq/rng.hpp"

namespace actq {

namespace {

// Distinct streams per purpose so that changing one generator does not shift
// another.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix to_binary32(const Matrix& m) {
  std::vector<double> d(m.data().begin(), m.data().end());
  for (double& v : d) v = static_cast<double>(static_cast<float>(v));
  return Matrix(m.rows(), m.cols(), std::move(d));
}

void push_pair(std::vector<LayerRecord>& out, const std::string& name, const Matrix& x, const Matrix& w) {
  out.push_back({name, TensorKind::Activation, to_binary32(x), StoredDtype::F32});
  out.push_back({name, TensorKind::Weight, to_binary32(w), StoredDtype::F32});
}

}  // namespace

Matrix synth_benign_weight(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> d(rows * cols);
  for (double& v : d) v = sigma * rng.normal();
  return Matrix(rows, cols, std::move(d));
}

Matrix synth_massive_activation(const MassiveLayerSpec& spec) {
  const auto token = synth_massive_token(spec.token);
  const std::size_t d = spec.token.dim;
  if (spec.massive_row >= spec.tokens) throw InvalidArgument("massive row out of range");
  Rng rng(derive_seed(spec.seed, 1));
  std::vector<double> data(spec.tokens * d);
  for (std::size_t r = 0; r < spec.tokens; ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      data[r * d + c] = r == spec.massive_row ? token[c] : spec.token.noise_sigma * rng.normal();
    }
  }
  return Matrix(spec.tokens, d, std::move(data));
}

Matrix synth_massive_weight(const MassiveLayerSpec& spec) {
  const Matrix base = synth_benign_weight(spec.token.dim, spec.out_channels, spec.weight_sigma, spec.seed);
  std::vector<double> d(base.data().begin(), base.data().end());
  for (const auto& [j, o] : spec.token.outliers) {
    for (std::size_t c = 0; c < spec.out_channels; ++c) d[j * spec.out_channels + c] *= spec.outlier_row_scale;
  }
  return Matrix(base.rows(), base.cols(), std::move(d));
}

std::vector<MassiveLayerSpec> massive_basic_specs(std::uint64_t seed) {
  auto make = [&](std::string name, std::size_t dim, std::map<std::size_t, double> outliers,
                  std::uint64_t salt) {
    MassiveLayerSpec s;
    s.name = std::move(name);
    s.token.dim = dim;
    s.token.outliers = std::move(outliers);
    s.token.noise_sigma = 0.1;
    s.outlier_row_scale = 0.1;
    s.token.seed = derive_seed(seed, salt);
    s.seed = derive_seed(seed, salt + 100);
    return s;
  };
  return {
      make("layer.1.down_proj", 4096, {{1415, 1000.0}}, 1),
      make("layer.2.down_proj", 11008, {{1415, 900.0}, {2533, -600.0}}, 2),
      make("layer.30.down_proj", 4096, {{1415, 800.0}, {2533, 450.0}}, 3),
      make("layer.31.down_proj", 4096, {{1415, 700.0}, {2533, 400.0}, {3301, 250.0}}, 4),
  };
}

std::vector<SystematicLayerSpec> systematic_specs(std::uint64_t seed) {
  std::vector<SystematicLayerSpec> out;
  const char* modules[] = {"k_proj", "o_proj", "gate_proj"};
  for (std::size_t i = 0; i < 3; ++i) {
    SystematicLayerSpec s;
    s.name = "layer." + std::to_string(i) + "." + modules[i];
    s.activation = {512, 256, {17 + 40 * i}, 100.0, 1.0, derive_seed(seed, 10 + i)};
    s.seed = derive_seed(seed, 20 + i);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<SystematicLayerSpec> graded_specs(std::uint64_t seed) {
  const double scales[] = {1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0};
  std::vector<SystematicLayerSpec> out;
  for (std::size_t i = 0; i < std::size(scales); ++i) {
    SystematicLayerSpec s;
    s.name = "layer." + std::to_string(i) + ".gate_proj";
    s.activation = {128, 512, {3, 200}, scales[i], 1.0, derive_seed(seed, 30 + i)};
    s.seed = derive_seed(seed, 50 + i);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> suite_names() { return {"massive-basic", "systematic", "graded"}; }

std::vector<LayerRecord> synth_suite(std::string_view name, std::uint64_t seed) {
  std::vector<LayerRecord> out;
  if (name == "massive-basic") {
    for (const auto& s : massive_basic_specs(seed)) {
      push_pair(out, s.name, synth_massive_activation(s), synth_massive_weight(s));
    }
    return out;
  }
  if (name == "systematic" || name == "graded") {
    const auto specs = name == "systematic" ? systematic_specs(seed) : graded_specs(seed);
    for (const auto& s : specs) {
      push_pair(out, s.name, synth_systematic(s.activation),
                synth_benign_weight(s.activation.dim, s.out_channels, s.weight_sigma, s.seed));
    }
    return out;
  }
  std::string known;
  for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown suite '" + std::string(name) + "' (available: " + known + ")");
}

}  // namespace actq
