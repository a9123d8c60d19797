#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "gsa/graph.hpp"

namespace gsa {

/// Canonical form: the numerically smallest code over all k! relabelings.
///
/// Permutations are enumerated depth-first, filling graphlet positions from
/// k-1 down to 0. Placing position p fixes row p of the code, which sits above
/// every row still unplaced, so a partial assignment whose fixed high bits
/// already exceed the best complete code found so far is cut.
GraphletCode canonical_code(const GraphletCode& code);

/// Isomorphism test. Rejects on degree-sequence mismatch before canonizing.
/// Throws InputError if the sizes differ.
bool is_isomorphic(const GraphletCode& a, const GraphletCode& b);

/// All non-isomorphic graphs on k nodes, indexed by ascending canonical code.
class Atlas {
 public:
  Atlas() = default;

  int k() const { return k_; }
  std::size_t size() const { return codes_.size(); }
  const std::vector<std::uint64_t>& canonical_codes() const { return codes_; }

  /// Position of the isomorphism class of `code`. Total over valid size-k codes.
  std::size_t match_index(const GraphletCode& code) const;

  /// Position of an already-canonical code.
  std::size_t index_of_canonical(std::uint64_t canonical_bits) const;

  /// Builds the atlas from a list of canonical codes; sorts and dedupes.
  static Atlas from_codes(int k, std::vector<std::uint64_t> canonical);

  friend bool operator==(const Atlas&, const Atlas&) = default;

 private:
  int k_ = 0;
  std::vector<std::uint64_t> codes_;
};

/// Enumerates the size-k atlas by extending every (k-1)-class with a new node
/// in each of its 2^(k-1) attachment patterns. Base case k = 2: {0, 1}.
/// Throws InputError outside 2 <= k <= 8.
Atlas build_atlas(int k);

/// Cache file: "GATLAS1", k (u8), N_k (u64 LE), then N_k u64 LE codes ascending.
void save_atlas(const Atlas& atlas, const std::filesystem::path& path);
Atlas load_atlas(const std::filesystem::path& path);

/// Loads `dir`/atlas_k<k>.bin when present and valid, else builds and writes it.
Atlas cached_atlas(int k, const std::filesystem::path& dir);

}  // namespace gsa
