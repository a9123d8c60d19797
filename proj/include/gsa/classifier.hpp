#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gsa {

struct TrainConfig {
  /// L2 strength; 0 selects 1/n.
  double lambda = 0.0;
  int epochs = 50;
  std::uint64_t seed = 0;
  bool standardize = true;
};

/// Binary linear classifier over embedding vectors. Labels are -1 / +1.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  int classes[2] = {-1, +1};
  TrainConfig config;  // with lambda resolved
  std::vector<double> mean;
  std::vector<double> scale;

  std::size_t dim() const { return weights.size(); }
  double score(std::span<const double> x) const;
};

/// L2-regularized hinge loss minimized by stochastic subgradient descent with
/// step 1/(lambda t) (Pegasos). Coordinates are standardized first (zero
/// variance columns get scale 1). The bias is the weight of a constant input
/// and is regularized with the rest. Each epoch visits a fresh seeded
/// permutation of the examples.
///
/// Throws InputError on fewer than 2 examples, a missing class, labels other
/// than -1/+1 or ragged rows.
LinearModel train(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                  const TrainConfig& config);

/// +1 when the score is positive, otherwise -1 (ties go to the first class).
int predict(const LinearModel& model, std::span<const double> x);

/// Fraction of correct predictions. Throws InputError on an empty test set.
double evaluate(const LinearModel& model, const std::vector<std::vector<double>>& x,
                const std::vector<int>& y);

/// key=value header (format, lambda, epochs, seed, standardize, classes, dim)
/// followed by four CSV lines: mean, scale, weights, bias. Doubles use 17
/// significant digits so the model reloads bit-exactly.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace gsa
