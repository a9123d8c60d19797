#include "gsa/atlas.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <string>

#include "gsa/binary_io.hpp"
#include "gsa/error.hpp"
#include "gsa/file_util.hpp"

namespace gsa {
namespace {

constexpr const char* kAtlasMagic = "GATLAS1";

struct CanonSearch {
  int k = 0;
  std::array<std::uint8_t, kMaxGraphletSize> adjacency{};  // neighbor masks
  std::array<int, kMaxGraphletSize> row_start{};
  std::array<int, kMaxGraphletSize> placed{};  // placed[p] = node at position p
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();

  // Positions above p are filled; `prefix` holds their rows.
  void descend(int p, unsigned used, std::uint64_t prefix) {
    if (p < 0) {
      best = std::min(best, prefix);
      return;
    }
    const std::uint64_t high_mask =
        p < k - 1 ? ~((std::uint64_t{1} << row_start[p]) - 1) : 0;
    for (int u = 0; u < k; ++u) {
      if ((used >> u) & 1U) continue;
      std::uint64_t row = 0;
      for (int j = p + 1; j < k; ++j) {
        if ((adjacency[u] >> placed[j]) & 1U) row |= std::uint64_t{1} << (j - p - 1);
      }
      const std::uint64_t next = p < k - 1 ? prefix | (row << row_start[p]) : prefix;
      if (p < k - 1 && next > (best & high_mask)) continue;
      placed[p] = u;
      descend(p - 1, used | (1U << u), next);
    }
  }
};

std::array<int, kMaxGraphletSize + 1> degree_histogram(const GraphletCode& code) {
  std::array<int, kMaxGraphletSize + 1> hist{};
  for (int i = 0; i < code.k; ++i) ++hist[code.degree(i)];
  return hist;
}

}  // namespace

GraphletCode canonical_code(const GraphletCode& code) {
  CanonSearch search;
  search.k = code.k;
  for (int i = 0; i < code.k; ++i) {
    for (int j = 0; j < code.k; ++j) {
      if (code.has_edge(i, j)) search.adjacency[i] |= static_cast<std::uint8_t>(1U << j);
    }
  }
  for (int p = 0; p + 1 < code.k; ++p) search.row_start[p] = pair_bit(p, p + 1, code.k);
  search.descend(code.k - 1, 0U, 0);
  GraphletCode out;
  out.k = code.k;
  out.bits = search.best;
  return out;
}

bool is_isomorphic(const GraphletCode& a, const GraphletCode& b) {
  if (a.k != b.k) {
    throw InputError("cannot compare graphlets of sizes " + std::to_string(a.k) + " and " +
                     std::to_string(b.k));
  }
  if (a.edge_count() != b.edge_count()) return false;
  if (degree_histogram(a) != degree_histogram(b)) return false;
  return canonical_code(a) == canonical_code(b);
}

std::size_t Atlas::index_of_canonical(std::uint64_t canonical_bits) const {
  const auto it = std::lower_bound(codes_.begin(), codes_.end(), canonical_bits);
  if (it == codes_.end() || *it != canonical_bits) {
    throw InvariantError("canonical code " + std::to_string(canonical_bits) +
                         " missing from the k=" + std::to_string(k_) + " atlas");
  }
  return static_cast<std::size_t>(it - codes_.begin());
}

std::size_t Atlas::match_index(const GraphletCode& code) const {
  if (code.k != k_) {
    throw InputError("graphlet size " + std::to_string(code.k) + " does not match atlas size " +
                     std::to_string(k_));
  }
  return index_of_canonical(canonical_code(code).bits);
}

Atlas Atlas::from_codes(int k, std::vector<std::uint64_t> canonical) {
  Atlas atlas;
  atlas.k_ = k;
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());
  atlas.codes_ = std::move(canonical);
  return atlas;
}

Atlas build_atlas(int k) {
  if (k < 2 || k > kMaxGraphletSize) {
    throw InputError("atlas size k=" + std::to_string(k) + " outside [2, 8]");
  }
  std::vector<std::uint64_t> codes{0, 1};
  for (int size = 3; size <= k; ++size) {
    const int parent = size - 1;
    std::vector<std::uint64_t> next;
    next.reserve(codes.size() << parent);
    for (std::uint64_t parent_bits : codes) {
      // Re-pack the parent's pairs into the wider layout.
      std::uint64_t base = 0;
      for (int i = 0; i < parent; ++i) {
        for (int j = i + 1; j < parent; ++j) {
          if ((parent_bits >> pair_bit(i, j, parent)) & 1U) {
            base |= std::uint64_t{1} << pair_bit(i, j, size);
          }
        }
      }
      for (unsigned pattern = 0; pattern < (1U << parent); ++pattern) {
        std::uint64_t bits = base;
        for (int i = 0; i < parent; ++i) {
          if ((pattern >> i) & 1U) bits |= std::uint64_t{1} << pair_bit(i, parent, size);
        }
        next.push_back(canonical_code(GraphletCode(size, bits)).bits);
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    codes = std::move(next);
  }
  return Atlas::from_codes(k, std::move(codes));
}

void save_atlas(const Atlas& atlas, const std::filesystem::path& path) {
  write_file_atomic(
      path,
      [&](std::ostream& out) {
        binary::write_magic(out, kAtlasMagic);
        binary::write_u8(out, static_cast<std::uint8_t>(atlas.k()));
        binary::write_u64(out, atlas.size());
        for (std::uint64_t code : atlas.canonical_codes()) binary::write_u64(out, code);
      },
      /*binary=*/true);
}

Atlas load_atlas(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open atlas cache " + path.string());
  binary::expect_magic(in, kAtlasMagic);
  const int k = binary::read_u8(in);
  if (k < 2 || k > kMaxGraphletSize) throw InputError("atlas cache has invalid k");
  const std::uint64_t count = binary::read_u64(in);
  if (count > (std::uint64_t{1} << pair_count(k))) {
    throw InputError("atlas cache has an impossible class count");
  }
  std::vector<std::uint64_t> codes(count);
  for (auto& code : codes) code = binary::read_u64(in);
  if (!std::is_sorted(codes.begin(), codes.end()) ||
      std::adjacent_find(codes.begin(), codes.end()) != codes.end()) {
    throw InputError("atlas cache codes are not strictly ascending");
  }
  for (std::uint64_t code : codes) {
    if (canonical_code(GraphletCode(k, code)).bits != code) {
      throw InputError("atlas cache contains a non-canonical code");
    }
  }
  return Atlas::from_codes(k, std::move(codes));
}

Atlas cached_atlas(int k, const std::filesystem::path& dir) {
  const auto path = dir / ("atlas_k" + std::to_string(k) + ".bin");
  if (std::filesystem::exists(path)) {
    try {
      Atlas atlas = load_atlas(path);
      if (atlas.k() == k) return atlas;
    } catch (const InputError&) {
      // Corrupt or stale cache: rebuild below.
    }
  }
  Atlas atlas = build_atlas(k);
  save_atlas(atlas, path);
  return atlas;
}

}  // namespace gsa
