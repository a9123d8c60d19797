#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gsa/atlas.hpp"
#include "gsa/graph.hpp"

namespace gsa {

enum class MapKind { kMatch, kGaussian, kGaussianEig, kOpuSim };

std::string to_string(MapKind kind);
MapKind parse_map_kind(const std::string& text);

/// Declarative description of a graphlet feature map.
struct FeatureMapSpec {
  MapKind kind = MapKind::kOpuSim;
  int k = 3;
  /// Output dimension. For kMatch, 0 means "use N_k"; any other value must equal N_k.
  std::size_t m = 0;
  /// Variance of each Gaussian weight entry; the approximated kernel is
  /// exp(-sigma2 * |x - y|^2 / 2).
  double sigma2 = 0.01;
  std::uint64_t seed = 0;
  /// Variance of the complex OPU bias (real and imaginary parts each get
  /// half). Zero disables the bias.
  double opu_bias_variance = 0.0;

  /// Stable textual identity used to check that embeddings are comparable.
  std::string fingerprint() const;
};

/// A feature map with its random parameters drawn. Immutable; evaluation is
/// pure and safe to call from several threads.
class RealizedMap {
 public:
  const FeatureMapSpec& spec() const { return spec_; }
  std::size_t output_dim() const { return spec_.m; }
  /// Length of the vector the weights act on: k*k, or k for kGaussianEig.
  std::size_t input_dim() const { return input_dim_; }

  /// Row-major m x d weights (real parts for kOpuSim).
  std::span<const double> weights() const { return weights_; }
  /// Row-major m x d imaginary parts; kOpuSim only.
  std::span<const double> weights_imag() const { return weights_imag_; }
  /// Phases in [0, 2pi) for Gaussian kinds; real parts of the bias for kOpuSim.
  std::span<const double> biases() const { return biases_; }
  std::span<const double> biases_imag() const { return biases_imag_; }

  const Atlas& atlas() const;

  /// phi(F) for any kind, written into `out` (length output_dim()).
  void evaluate(const GraphletCode& code, std::span<double> out) const;

  friend RealizedMap realize(const FeatureMapSpec& spec, std::shared_ptr<const Atlas> atlas);
  friend RealizedMap load_map(const std::filesystem::path& path);

 private:
  FeatureMapSpec spec_;
  std::size_t input_dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> weights_imag_;
  std::vector<double> biases_;
  std::vector<double> biases_imag_;
  std::shared_ptr<const Atlas> atlas_;
};

/// Draws the parameters of `spec` from its seed.
///
/// kGaussian / kGaussianEig: weights iid N(0, sigma2), phases iid U[0, 2pi).
/// kOpuSim: weights complex with iid N(0, 1/2) real and imaginary parts, so
/// E|w|^2 = 1; bias zero unless opu_bias_variance > 0.
/// kMatch: binds the size-k atlas (built if `atlas` is null). Throws
/// InputError if m is neither 0 nor N_k.
RealizedMap realize(const FeatureMapSpec& spec, std::shared_ptr<const Atlas> atlas = nullptr);

/// Atlas position of the one-hot coordinate of phi_match(code).
std::size_t phi_match_index(const RealizedMap& map, const GraphletCode& code);
std::vector<double> phi_match(const RealizedMap& map, const GraphletCode& code);

/// sqrt(2/m) * cos(w_j . x + b_j) for j < m. Throws InputError when x has the
/// wrong length or the map is not a Gaussian kind.
std::vector<double> phi_gaussian(const RealizedMap& map, std::span<const double> x);
void phi_gaussian(const RealizedMap& map, std::span<const double> x, std::span<double> out);

/// Eigenvalues of the graphlet adjacency, ascending (cyclic Jacobi).
std::vector<double> sorted_eigenvalues(const GraphletCode& code);

/// Cyclic Jacobi on a symmetric n x n row-major matrix; returns ascending
/// eigenvalues. Sweeps stop when the off-diagonal Frobenius norm drops below
/// 1e-12, or after 100 sweeps.
std::vector<double> jacobi_eigenvalues(std::vector<double> matrix, int n);

/// |w_j . a_F + b_j|^2 / sqrt(m).
std::vector<double> phi_opu_sim(const RealizedMap& map, const GraphletCode& code);
void phi_opu_sim(const RealizedMap& map, const GraphletCode& code, std::span<double> out);

/// Kernel of the zero-bias simulated OPU map: |x|^2 |y|^2 + (x . y)^2.
double opu_kernel_closed_form(std::span<const double> x, std::span<const double> y);

/// exp(-sigma2 * |x - y|^2 / 2), the kernel approximated by phi_gaussian.
double gaussian_kernel(std::span<const double> x, std::span<const double> y, double sigma2);

/// Binary parameter file: "GRFMAP1", kind (u8), k (u8), m (u64), d (u64),
/// sigma2 (f64), opu_bias_variance (f64), seed (u64), then row-major
/// little-endian f64 arrays: weights (m*d), [weights_imag (m*d)], biases (m),
/// [biases_imag (m)]. Bracketed arrays are present for kOpuSim only; kMatch
/// stores no arrays.
void save_map(const RealizedMap& map, const std::filesystem::path& path);
RealizedMap load_map(const std::filesystem::path& path);

}  // namespace gsa
