#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gsa {

/// SplitMix64 finalizer, used to turn (seed, stream) pairs into engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream identifiers used to split one experiment seed into independent
/// sub-streams. The tag occupies the high 16 bits, the index the rest.
enum class StreamTag : std::uint16_t {
  kDataset = 1,
  kMap = 2,
  kSampling = 3,
  kSplit = 4,
  kClassifier = 5,
  kTrial = 6,
  kPermutation = 7,
  kBench = 8,
};

constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t index) {
  return (static_cast<std::uint64_t>(tag) << 48) ^ (index & 0x0000ffffffffffffULL);
}

/// Deterministic random stream.
///
/// Engine: std::mt19937_64 seeded with splitmix64(seed) ^ splitmix64(~stream),
/// then splitmix64 again. The engine's output sequence is fixed by the C++
/// standard; the distributions below are written out by hand because the
/// standard library's distributions are implementation-defined. Together this
/// makes a (seed, stream) pair produce the same variates on every platform.
///
///   uniform()      (x >> 11) * 2^-53, in [0, 1)
///   below(n)       Lemire multiply-shift with rejection, exact in [0, n)
///   normal()       Box-Muller, both outputs used, u1 taken in (0, 1]
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+splitmix64";

  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed),
        stream_(stream),
        engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 product = static_cast<unsigned __int128>(engine_()) * n;
    auto low = static_cast<std::uint64_t>(product);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        product = static_cast<unsigned __int128>(engine_()) * n;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gsa
