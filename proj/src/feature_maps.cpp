#include "gsa/feature_maps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gsa/binary_io.hpp"
#include "gsa/error.hpp"
#include "gsa/file_util.hpp"
#include "gsa/rng.hpp"

namespace gsa {
namespace {

constexpr const char* kMapMagic = "GRFMAP1";
constexpr int kJacobiMaxSweeps = 100;
constexpr double kJacobiTolerance = 1e-12;

bool is_gaussian_kind(MapKind kind) {
  return kind == MapKind::kGaussian || kind == MapKind::kGaussianEig;
}

std::size_t input_dim_for(const FeatureMapSpec& spec) {
  switch (spec.kind) {
    case MapKind::kGaussianEig:
      return static_cast<std::size_t>(spec.k);
    case MapKind::kGaussian:
    case MapKind::kOpuSim:
      return static_cast<std::size_t>(spec.k) * spec.k;
    case MapKind::kMatch:
      return 0;
  }
  return 0;
}

void validate(const FeatureMapSpec& spec) {
  if (spec.k < 2 || spec.k > kMaxGraphletSize) {
    throw InputError("feature map k=" + std::to_string(spec.k) + " outside [2, 8]");
  }
  if (spec.kind != MapKind::kMatch && spec.m == 0) {
    throw InputError("feature map dimension m must be at least 1");
  }
  if (is_gaussian_kind(spec.kind) && !(spec.sigma2 > 0.0)) {
    throw InputError("sigma2 must be positive");
  }
  if (!(spec.opu_bias_variance >= 0.0)) throw InputError("opu bias variance must be >= 0");
}

// Flattened adjacency entries that are 1, as indices into the k*k vector.
int set_entries(const GraphletCode& code, std::array<int, 64>& idx) {
  int count = 0;
  const int k = code.k;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (code.has_edge(i, j)) idx[count++] = i * k + j;
    }
  }
  return count;
}

}  // namespace

std::string to_string(MapKind kind) {
  switch (kind) {
    case MapKind::kMatch:
      return "match";
    case MapKind::kGaussian:
      return "gaussian";
    case MapKind::kGaussianEig:
      return "gaussian-eig";
    case MapKind::kOpuSim:
      return "opu";
  }
  return "?";
}

MapKind parse_map_kind(const std::string& text) {
  if (text == "match") return MapKind::kMatch;
  if (text == "gaussian" || text == "gs") return MapKind::kGaussian;
  if (text == "gaussian-eig" || text == "gs-eig" || text == "eig") return MapKind::kGaussianEig;
  if (text == "opu" || text == "opu-sim") return MapKind::kOpuSim;
  throw InputError("unknown feature map '" + text +
                   "' (expected match, gaussian, gaussian-eig or opu)");
}

std::string FeatureMapSpec::fingerprint() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(kind) << ";k=" << k << ";m=" << m << ";seed=" << seed;
  if (is_gaussian_kind(kind)) out << ";sigma2=" << sigma2;
  if (kind == MapKind::kOpuSim) out << ";bias_var=" << opu_bias_variance;
  return out.str();
}

const Atlas& RealizedMap::atlas() const {
  if (!atlas_) throw InputError("feature map '" + to_string(spec_.kind) + "' has no atlas");
  return *atlas_;
}

RealizedMap realize(const FeatureMapSpec& spec, std::shared_ptr<const Atlas> atlas) {
  validate(spec);
  RealizedMap map;
  map.spec_ = spec;
  map.input_dim_ = input_dim_for(spec);

  if (spec.kind == MapKind::kMatch) {
    if (!atlas) atlas = std::make_shared<const Atlas>(build_atlas(spec.k));
    if (atlas->k() != spec.k) throw InputError("atlas size does not match map k");
    if (spec.m != 0 && spec.m != atlas->size()) {
      throw InputError("match map needs m = N_" + std::to_string(spec.k) + " = " +
                       std::to_string(atlas->size()) + ", got " + std::to_string(spec.m));
    }
    map.spec_.m = atlas->size();
    map.atlas_ = std::move(atlas);
    return map;
  }

  RngStream rng(spec.seed, stream_id(StreamTag::kMap, 0));
  const std::size_t cells = spec.m * map.input_dim_;
  if (is_gaussian_kind(spec.kind)) {
    const double scale = std::sqrt(spec.sigma2);
    map.weights_.resize(cells);
    for (double& w : map.weights_) w = scale * rng.normal();
    map.biases_.resize(spec.m);
    for (double& b : map.biases_) b = 2.0 * std::numbers::pi * rng.uniform();
  } else {
    const double scale = std::sqrt(0.5);
    map.weights_.resize(cells);
    map.weights_imag_.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) {
      map.weights_[c] = scale * rng.normal();
      map.weights_imag_[c] = scale * rng.normal();
    }
    map.biases_.assign(spec.m, 0.0);
    map.biases_imag_.assign(spec.m, 0.0);
    if (spec.opu_bias_variance > 0.0) {
      const double bias_scale = std::sqrt(spec.opu_bias_variance / 2.0);
      for (std::size_t j = 0; j < spec.m; ++j) {
        map.biases_[j] = bias_scale * rng.normal();
        map.biases_imag_[j] = bias_scale * rng.normal();
      }
    }
  }
  return map;
}

void RealizedMap::evaluate(const GraphletCode& code, std::span<double> out) const {
  if (code.k != spec_.k) throw InputError("graphlet size does not match feature map k");
  switch (spec_.kind) {
    case MapKind::kMatch:
      std::fill(out.begin(), out.end(), 0.0);
      out[phi_match_index(*this, code)] = 1.0;
      return;
    case MapKind::kGaussian: {
      std::array<double, 64> flat{};
      const std::span<double> x(flat.data(), input_dim_);
      flatten_adjacency(code, x);
      phi_gaussian(*this, x, out);
      return;
    }
    case MapKind::kGaussianEig: {
      const auto eig = sorted_eigenvalues(code);
      phi_gaussian(*this, eig, out);
      return;
    }
    case MapKind::kOpuSim:
      phi_opu_sim(*this, code, out);
      return;
  }
}

std::size_t phi_match_index(const RealizedMap& map, const GraphletCode& code) {
  if (map.spec().kind != MapKind::kMatch) throw InputError("phi_match needs a match map");
  return map.atlas().match_index(code);
}

std::vector<double> phi_match(const RealizedMap& map, const GraphletCode& code) {
  std::vector<double> out(map.output_dim(), 0.0);
  out[phi_match_index(map, code)] = 1.0;
  return out;
}

void phi_gaussian(const RealizedMap& map, std::span<const double> x, std::span<double> out) {
  if (!is_gaussian_kind(map.spec().kind)) throw InputError("phi_gaussian needs a Gaussian map");
  const std::size_t d = map.input_dim();
  if (x.size() != d) {
    throw InputError("phi_gaussian input has length " + std::to_string(x.size()) +
                     ", expected " + std::to_string(d));
  }
  const std::size_t m = map.output_dim();
  const double amplitude = std::sqrt(2.0 / static_cast<double>(m));
  const auto w = map.weights();
  const auto b = map.biases();

  // Zero entries contribute exact zeros, so skipping them keeps the dot
  // product bit-identical to the dense loop.
  std::array<std::size_t, 64> nonzero{};
  std::size_t nnz = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (x[i] != 0.0) nonzero[nnz++] = i;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double* row = w.data() + j * d;
    double dot = 0.0;
    for (std::size_t t = 0; t < nnz; ++t) dot += row[nonzero[t]] * x[nonzero[t]];
    out[j] = amplitude * std::cos(dot + b[j]);
  }
}

std::vector<double> phi_gaussian(const RealizedMap& map, std::span<const double> x) {
  std::vector<double> out(map.output_dim());
  phi_gaussian(map, x, out);
  return out;
}

std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(p, q) * at(p, q);
    }
    if (std::sqrt(off) < kJacobiTolerance) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = at(p, r) = c * arp - s * arq;
          at(r, q) = at(q, r) = s * arp + c * arq;
        }
        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = at(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(n);
  for (int i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::vector<double> sorted_eigenvalues(const GraphletCode& code) {
  return jacobi_eigenvalues(flatten_adjacency(code), code.k);
}

void phi_opu_sim(const RealizedMap& map, const GraphletCode& code, std::span<double> out) {
  if (map.spec().kind != MapKind::kOpuSim) throw InputError("phi_opu_sim needs an OPU map");
  if (code.k != map.spec().k) throw InputError("graphlet size does not match feature map k");
  const std::size_t d = map.input_dim();
  const std::size_t m = map.output_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  const auto wr = map.weights();
  const auto wi = map.weights_imag();
  const auto br = map.biases();
  const auto bi = map.biases_imag();

  std::array<int, 64> idx{};
  const int nnz = set_entries(code, idx);
  for (std::size_t j = 0; j < m; ++j) {
    const double* row_re = wr.data() + j * d;
    const double* row_im = wi.data() + j * d;
    double re = 0.0;
    double im = 0.0;
    for (int t = 0; t < nnz; ++t) {
      re += row_re[idx[t]];
      im += row_im[idx[t]];
    }
    re += br[j];
    im += bi[j];
    out[j] = (re * re + im * im) * scale;
  }
}

std::vector<double> phi_opu_sim(const RealizedMap& map, const GraphletCode& code) {
  std::vector<double> out(map.output_dim());
  phi_opu_sim(map, code, out);
  return out;
}

double opu_kernel_closed_form(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("kernel inputs differ in length");
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx += x[i] * x[i];
    yy += y[i] * y[i];
    xy += x[i] * y[i];
  }
  return xx * yy + xy * xy;
}

double gaussian_kernel(std::span<const double> x, std::span<const double> y, double sigma2) {
  if (x.size() != y.size()) throw InputError("kernel inputs differ in length");
  double dist2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dist2 += (x[i] - y[i]) * (x[i] - y[i]);
  return std::exp(-sigma2 * dist2 / 2.0);
}

void save_map(const RealizedMap& map, const std::filesystem::path& path) {
  const auto& spec = map.spec();
  write_file_atomic(
      path,
      [&](std::ostream& out) {
        binary::write_magic(out, kMapMagic);
        binary::write_u8(out, static_cast<std::uint8_t>(spec.kind));
        binary::write_u8(out, static_cast<std::uint8_t>(spec.k));
        binary::write_u64(out, spec.m);
        binary::write_u64(out, map.input_dim());
        binary::write_f64(out, spec.sigma2);
        binary::write_f64(out, spec.opu_bias_variance);
        binary::write_u64(out, spec.seed);
        for (double w : map.weights()) binary::write_f64(out, w);
        for (double w : map.weights_imag()) binary::write_f64(out, w);
        for (double b : map.biases()) binary::write_f64(out, b);
        for (double b : map.biases_imag()) binary::write_f64(out, b);
      },
      /*binary=*/true);
}

RealizedMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open feature map file " + path.string());
  binary::expect_magic(in, kMapMagic);
  FeatureMapSpec spec;
  const int kind = binary::read_u8(in);
  if (kind > static_cast<int>(MapKind::kOpuSim)) throw InputError("unknown map kind in file");
  spec.kind = static_cast<MapKind>(kind);
  spec.k = binary::read_u8(in);
  spec.m = binary::read_u64(in);
  const std::uint64_t d = binary::read_u64(in);
  spec.sigma2 = binary::read_f64(in);
  spec.opu_bias_variance = binary::read_f64(in);
  spec.seed = binary::read_u64(in);
  validate(spec);
  if (spec.kind == MapKind::kMatch) return realize(spec);

  RealizedMap map;
  map.spec_ = spec;
  map.input_dim_ = input_dim_for(spec);
  if (d != map.input_dim_) throw InputError("map file input dimension is inconsistent");
  if (spec.m > (std::uint64_t{1} << 32)) throw InputError("map file dimension is implausible");
  auto read_array = [&](std::vector<double>& dst, std::size_t count) {
    dst.resize(count);
    for (double& value : dst) value = binary::read_f64(in);
  };
  read_array(map.weights_, spec.m * d);
  if (spec.kind == MapKind::kOpuSim) read_array(map.weights_imag_, spec.m * d);
  read_array(map.biases_, spec.m);
  if (spec.kind == MapKind::kOpuSim) read_array(map.biases_imag_, spec.m);
  if (in.peek() != std::char_traits<char>::eof()) throw InputError("trailing bytes in map file");
  return map;
}

}  // namespace gsa
