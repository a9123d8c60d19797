#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsa/atlas.hpp"
#include "gsa/classifier.hpp"
#include "gsa/data_io.hpp"
#include "gsa/embedding.hpp"
#include "gsa/feature_maps.hpp"
#include "gsa/sampling.hpp"

namespace gsa::cli {

enum class DatasetKind { kSbm, kTu, kEdgeList };

struct DatasetSource {
  DatasetKind kind = DatasetKind::kSbm;
  SbmSpec sbm;
  std::filesystem::path path;  // TU directory or edge-list file
};

/// Everything a command needs. All randomness derives from `seed`:
/// repetition i uses seed + i for dataset generation, map realization,
/// sampling, splitting and training (each on its own stream).
struct ExperimentConfig {
  DatasetSource dataset;
  SamplerSpec sampler;
  FeatureMapSpec map;
  std::size_t s = 2000;
  /// Match only: exact k-spectra instead of sampled histograms.
  bool exact = false;
  TrainConfig classifier;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::size_t repetitions = 1;
  /// train-eval grids; an empty list means "just the configured value".
  std::vector<double> r_list;
  std::vector<std::size_t> m_list;
  std::filesystem::path out = "gsa_out";
  std::filesystem::path atlas_dir;  // defaults to `out`
  unsigned threads = 1;

  /// Throws InputError on inconsistent settings before any work starts.
  void validate() const;
  /// key=value lines describing the full configuration.
  void write(std::ostream& out) const;
};

/// Builds (or loads) the k-atlas into `out`/atlas_k<k>.bin and prints "N_k = <count>".
Atlas cmd_atlas(int k, const std::filesystem::path& out, std::ostream& log);

/// Writes the dataset described by `config` to `out`/dataset.txt.
std::filesystem::path cmd_gen_sbm(const ExperimentConfig& config, std::ostream& log);

struct EmbedResult {
  std::filesystem::path csv;
  std::filesystem::path meta;
  std::size_t rows = 0;
  std::vector<std::size_t> skipped;
};

/// Embeds the dataset into `out`/embedding.csv with sidecar embedding.meta.
EmbedResult cmd_embed(const ExperimentConfig& config, std::ostream& log);

struct RepetitionResult {
  double r = 0.0;
  std::size_t m = 0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t skipped = 0;
  double lambda = 0.0;
  double accuracy = 0.0;
  double embed_seconds = 0.0;
  double train_seconds = 0.0;
};

struct GridSummary {
  double r = 0.0;
  std::size_t m = 0;
  std::size_t repetitions = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct TrainEvalResult {
  std::vector<RepetitionResult> repetitions;
  std::vector<GridSummary> summary;
  std::filesystem::path report;
};

/// One repetition: dataset (regenerated per seed for SBM), embed, split,
/// train, evaluate.
RepetitionResult run_repetition(const ExperimentConfig& config, double r, std::size_t m,
                                std::size_t repetition,
                                std::shared_ptr<const Atlas> atlas = nullptr);

/// Runs the r x m x repetition grid. Writes `out`/report.txt (config plus
/// per-repetition and summary CSV; deterministic), `out`/report_timing.csv
/// (wall clock) and `out`/model.txt (model of the first repetition).
TrainEvalResult cmd_train_eval(const ExperimentConfig& config, std::ostream& log);

struct BenchConfig {
  std::vector<int> k_list = {3, 4, 5, 6, 7};
  std::vector<MapKind> maps = {MapKind::kMatch, MapKind::kGaussian, MapKind::kGaussianEig,
                               MapKind::kOpuSim};
  std::size_t m = 5000;
  double sigma2 = 0.01;
  std::size_t trials = 30;      // timed batches per (map, k)
  std::size_t batch = 100;      // graphlets per batch
  std::size_t warmup = 3;       // untimed batches
  std::uint64_t seed = 0;
  std::filesystem::path out = "gsa_out";
  std::filesystem::path atlas_dir;
};

struct BenchRow {
  MapKind map = MapKind::kMatch;
  int k = 0;
  double median_ns = 0.0;
  double p10_ns = 0.0;
  double p90_ns = 0.0;
};

struct BenchFit {
  MapKind map = MapKind::kMatch;
  /// Slope of log(median time) against log(k).
  double exponent = 0.0;
  /// median time at the largest k over median time at the smallest k.
  double growth = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchFit> fits;
  std::filesystem::path csv;
};

/// Least-squares slope of log(t) on log(k).
double fit_loglog_exponent(const std::vector<int>& k, const std::vector<double>& t);

/// Per-graphlet cost of each map. Graphlets are uniform samples from one SBM
/// graph (v=60, r=1.1). Writes `out`/bench.csv and `out`/bench_fit.txt.
BenchResult cmd_bench(const BenchConfig& config, std::ostream& log);

struct MmdCheckConfig {
  ExperimentConfig experiment;  // dataset, sampler, map, seed, out, threads
  /// Which pair to compare: "cross" (first graph of each class), "same"
  /// (first graph against itself) or "permuted" (first graph against a
  /// random relabeling of itself).
  std::string pair = "cross";
  std::size_t m = 4096;
  std::size_t s = 4096;
  double delta = 0.1;
  /// Feature bound B; 0 picks sqrt(2) for Gaussian kinds and 1 otherwise.
  double feature_bound = 0.0;
  std::size_t trials = 200;
  std::size_t reference_scale = 16;
};

/// Writes `out`/mmd_report.txt: configuration, bound, violation rate, and a
/// CSV of per-trial distances and deviations.
ConcentrationReport cmd_mmd_check(const MmdCheckConfig& config, std::ostream& log);

/// Loads or generates the configured dataset (SBM uses `seed`).
LabeledDataset load_dataset(const DatasetSource& source, std::uint64_t seed);

}  // namespace gsa::cli
