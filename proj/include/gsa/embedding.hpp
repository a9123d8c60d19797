#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gsa/atlas.hpp"
#include "gsa/data_io.hpp"
#include "gsa/feature_maps.hpp"
#include "gsa/graph.hpp"
#include "gsa/rng.hpp"
#include "gsa/sampling.hpp"

namespace gsa {

/// Per-graph representation: the mean of phi over sampled graphlets, or the
/// exact k-spectrum.
struct Embedding {
  std::vector<double> values;
  /// Identity of the map that produced `values`; embeddings are comparable
  /// only when this matches.
  std::string map_fingerprint;
  SamplerSpec sampler;
  std::size_t samples = 0;  // 0 for exact spectra
  std::size_t graph_id = 0;
};

/// Mean of phi over s graphlets drawn iid from the sampler.
///
/// Identical labeled codes are grouped: the sum is accumulated as
/// count(code) * phi(code) in ascending code order, in 64-bit floating point,
/// and divided by s once at the end.
Embedding gsa_embed(const Graph& g, const SamplerSpec& sampler, const RealizedMap& map,
                    std::size_t s, RngStream& rng);

/// Refuses exact enumeration above this many k-subsets.
inline constexpr double kExactSpectrumLimit = 1e7;

/// Exact k-spectrum: histogram of isomorphism classes over all C(v, k)
/// induced subgraphs. Throws InputError when C(v, k) exceeds the limit.
Embedding exact_spectrum(const Graph& g, const Atlas& atlas);

/// Fingerprint attached to exact spectra.
std::string exact_spectrum_fingerprint(int k);

/// Squared Euclidean distance. Throws InputError on length or map mismatch.
double mmd_sq_estimate(const Embedding& a, const Embedding& b);

/// B^2 * (4 sqrt(log(6/delta)) / sqrt(m) + 8 (1 + sqrt(2 log(3/delta))) / sqrt(s)).
/// B = 1 is the bound for features with |xi_w| <= 1. Throws InputError unless
/// 0 < delta < 1 and m, s >= 1.
double theorem1_bound(double m, double s, double delta, double feature_bound = 1.0);

struct ConcentrationReport {
  std::size_t trials = 0;
  std::size_t m = 0;
  std::size_t s = 0;
  double delta = 0.0;
  double feature_bound = 1.0;
  double reference_mmd_sq = 0.0;
  std::size_t reference_m = 0;
  std::size_t reference_s = 0;  // 0 when the reference uses exact spectra
  /// |distance_t - reference| per trial.
  std::vector<double> deviations;
  /// |f_hat - f_hat'|^2 per trial.
  std::vector<double> distances;
  double bound = 0.0;
  double violation_rate = 0.0;

  double median_deviation() const;
};

struct ConcentrationConfig {
  SamplerSpec sampler;
  FeatureMapSpec map;  // map.m is overridden by `m`
  std::size_t m = 1024;
  std::size_t s = 1024;
  double delta = 0.1;
  double feature_bound = 1.0;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  /// Reference MMD uses reference_scale * m features and reference_scale * s
  /// samples (exact spectra for match maps when feasible). Both reference
  /// embeddings draw from the same random stream.
  std::size_t reference_scale = 16;
  unsigned threads = 1;
};

/// Repeats the embedding of g and g2 with a fresh map realization and fresh
/// samples per trial and records how far |f_hat - f_hat'|^2 lands from a
/// high-precision MMD^2 reference, against theorem1_bound.
ConcentrationReport run_concentration_trials(const Graph& g, const Graph& g2,
                                             const ConcentrationConfig& config,
                                             std::shared_ptr<const Atlas> atlas = nullptr);

/// Embeds every graph with at least k nodes; graph i samples from stream
/// (seed, sampling/i). Indices of skipped graphs are appended to `skipped`.
std::vector<Embedding> embed_dataset(const LabeledDataset& data, const SamplerSpec& sampler,
                                     const RealizedMap& map, std::size_t s, std::uint64_t seed,
                                     unsigned threads, std::vector<std::size_t>* skipped);

/// Exact spectra for every graph with at least k nodes.
std::vector<Embedding> exact_spectra_dataset(const LabeledDataset& data, const Atlas& atlas,
                                             unsigned threads,
                                             std::vector<std::size_t>* skipped);

/// CSV with header graph_id,label,f_0,...,f_{m-1}; values at 17 significant digits.
void write_embeddings_csv(const std::vector<Embedding>& rows, const std::vector<int>& labels,
                          const std::filesystem::path& path);

struct EmbeddingMatrix {
  std::vector<std::size_t> graph_ids;
  std::vector<int> labels;
  std::vector<std::vector<double>> rows;
};
EmbeddingMatrix read_embeddings_csv(const std::filesystem::path& path);

}  // namespace gsa
