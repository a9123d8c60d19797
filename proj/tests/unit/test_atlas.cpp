#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "gsa/atlas.hpp"
#include "gsa/error.hpp"
#include "oracles.hpp"

using namespace gsa;

namespace {

std::uint64_t mask(int k) { return (std::uint64_t{1} << pair_count(k)) - 1; }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gsa_atlas_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("canonical_code examples") {
  // path 0-1-2 and path 1-0-2 (edges 0-1, 0-2)
  CHECK(canonical_code(GraphletCode(3, 0b101)) == canonical_code(GraphletCode(3, 0b011)));
  CHECK(canonical_code(GraphletCode(3, 0)).bits == 0);
  for (int k = 2; k <= 8; ++k) {
    CHECK(canonical_code(GraphletCode(k, mask(k))).bits == mask(k));
  }
}

TEST_CASE("canonical_code matches the permutation oracle") {
  for (int k = 2; k <= 4; ++k) {
    for (std::uint64_t c = 0; c <= mask(k); ++c) {
      CHECK(canonical_code(GraphletCode(k, c)).bits == oracle::brute_canonical(c, k));
    }
  }
  RngStream rng(17, 0);
  for (int k = 5; k <= 7; ++k) {
    for (int trial = 0; trial < (k == 7 ? 30 : 300); ++trial) {
      const std::uint64_t c = rng.next_u64() & mask(k);
      CHECK(canonical_code(GraphletCode(k, c)).bits == oracle::brute_canonical(c, k));
    }
  }
}

TEST_CASE("canonical_code is idempotent and permutation invariant") {
  RngStream rng(23, 0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(6));
    const GraphletCode c(k, rng.next_u64() & mask(k));
    const GraphletCode canon = canonical_code(c);
    CHECK(canonical_code(canon) == canon);
    const auto pi = oracle::random_perm(k, rng);
    CHECK(canonical_code(c.permuted(pi)) == canon);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const GraphletCode c(8, rng.next_u64() & mask(8));
    CHECK(canonical_code(c.permuted(oracle::random_perm(8, rng))) == canonical_code(c));
  }
}

TEST_CASE("is_isomorphic examples") {
  const GraphletCode tri(3, 0b111);
  CHECK(is_isomorphic(tri, tri.permuted(std::vector<int>{2, 0, 1})));
  // P3 vs single edge plus isolated node
  CHECK_FALSE(is_isomorphic(GraphletCode(3, 0b101), GraphletCode(3, 0b001)));
  // P4 (0-1, 1-2, 2-3) vs star S3 (0-1, 0-2, 0-3)
  const GraphletCode p4(4, (1u << pair_bit(0, 1, 4)) | (1u << pair_bit(1, 2, 4)) |
                               (1u << pair_bit(2, 3, 4)));
  const GraphletCode s3(4, (1u << pair_bit(0, 1, 4)) | (1u << pair_bit(0, 2, 4)) |
                               (1u << pair_bit(0, 3, 4)));
  CHECK(p4.edge_count() == s3.edge_count());
  CHECK_FALSE(is_isomorphic(p4, s3));
  CHECK(oracle::brute_canonical(p4.bits, 4) != oracle::brute_canonical(s3.bits, 4));
  CHECK_THROWS_AS(is_isomorphic(GraphletCode(3, 0), GraphletCode(4, 0)), InputError);
}

TEST_CASE("is_isomorphic agrees with the oracle at k=5") {
  RngStream rng(31, 0);
  for (int trial = 0; trial < 400; ++trial) {
    // Same edge count half the time so the degree filter is not the whole story.
    const std::uint64_t a = rng.next_u64() & mask(5);
    std::uint64_t b = rng.next_u64() & mask(5);
    if (trial % 2 == 0) b = oracle::relabel(a, 5, oracle::random_perm(5, rng));
    if (trial % 4 == 1) {
      while (__builtin_popcountll(b) != __builtin_popcountll(a)) b = rng.next_u64() & mask(5);
    }
    CHECK(is_isomorphic(GraphletCode(5, a), GraphletCode(5, b)) ==
          (oracle::brute_canonical(a, 5) == oracle::brute_canonical(b, 5)));
  }
}

TEST_CASE("atlas sizes") {
  const std::map<int, std::size_t> expected = {{2, 2},   {3, 4},    {4, 11},
                                               {5, 34},  {6, 156},  {7, 1044}};
  for (const auto& [k, n] : expected) CHECK(build_atlas(k).size() == n);
  CHECK_THROWS_AS(build_atlas(1), InputError);
  CHECK_THROWS_AS(build_atlas(9), InputError);
}

TEST_CASE("incremental atlas equals the exhaustive oracle") {
  for (int k = 2; k <= 5; ++k) {
    CHECK(build_atlas(k).canonical_codes() == oracle::brute_atlas(k));
  }
}

TEST_CASE("atlas invariants") {
  for (int k = 2; k <= 6; ++k) {
    const Atlas atlas = build_atlas(k);
    const auto& codes = atlas.canonical_codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
      CHECK(canonical_code(GraphletCode(k, codes[i])).bits == codes[i]);
      if (i > 0) CHECK(codes[i - 1] < codes[i]);
      CHECK(atlas.index_of_canonical(codes[i]) == i);
    }
    CHECK(codes.front() == 0);
    CHECK(atlas.match_index(GraphletCode(k, 0)) == 0);
  }
}

TEST_CASE("labeled class sizes partition every code") {
  for (int k = 2; k <= 5; ++k) {
    const Atlas atlas = build_atlas(k);
    std::vector<std::uint64_t> sizes(atlas.size(), 0);
    for (std::uint64_t c = 0; c <= mask(k); ++c) ++sizes[atlas.match_index(GraphletCode(k, c))];
    std::uint64_t total = 0;
    for (auto s : sizes) {
      CHECK(s > 0);
      total += s;
    }
    CHECK(total == (std::uint64_t{1} << pair_count(k)));
    if (k == 3) CHECK(sizes == std::vector<std::uint64_t>{1, 3, 3, 1});
  }
}

TEST_CASE("match_index of isomorphic inputs coincide") {
  const Atlas atlas = build_atlas(6);
  RngStream rng(41, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const GraphletCode c(6, rng.next_u64() & mask(6));
    CHECK(atlas.match_index(c) == atlas.match_index(c.permuted(oracle::random_perm(6, rng))));
  }
  CHECK_THROWS_AS(atlas.index_of_canonical(0b10), InvariantError);
  CHECK_THROWS_AS(atlas.match_index(GraphletCode(5, 0)), InputError);
}

TEST_CASE("atlas cache round-trip and validation") {
  const auto dir = scratch("cache");
  const Atlas built = build_atlas(6);
  save_atlas(built, dir / "a.bin");
  CHECK(load_atlas(dir / "a.bin") == built);

  CHECK(cached_atlas(5, dir) == build_atlas(5));
  CHECK(std::filesystem::exists(dir / "atlas_k5.bin"));
  CHECK(cached_atlas(5, dir) == build_atlas(5));

  {
    std::ofstream out(dir / "bad.bin", std::ios::binary);
    out << "NOTANATLAS";
  }
  CHECK_THROWS_AS(load_atlas(dir / "bad.bin"), InputError);
  CHECK_THROWS_AS(load_atlas(dir / "missing.bin"), InputError);

  // A corrupt cache is rebuilt rather than trusted.
  std::filesystem::copy_file(dir / "bad.bin", dir / "atlas_k4.bin");
  CHECK(cached_atlas(4, dir) == build_atlas(4));
  std::filesystem::remove_all(dir);
}
