#include "gsa/graph.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "gsa/error.hpp"

namespace gsa {

GraphletCode::GraphletCode(int size, std::uint64_t packed)
    : k(static_cast<std::uint8_t>(size)), bits(packed) {
  if (size < 2 || size > kMaxGraphletSize) {
    throw InputError("graphlet size " + std::to_string(size) + " outside [2, 8]");
  }
  if (packed >> pair_count(size)) {
    throw InputError("graphlet code has bits above position " +
                     std::to_string(pair_count(size) - 1));
  }
}

bool GraphletCode::has_edge(int i, int j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  return (bits >> pair_bit(i, j, k)) & 1U;
}

int GraphletCode::edge_count() const { return std::popcount(bits); }

int GraphletCode::degree(int i) const {
  int d = 0;
  for (int j = 0; j < k; ++j) d += has_edge(i, j) ? 1 : 0;
  return d;
}

GraphletCode GraphletCode::permuted(std::span<const int> perm) const {
  std::uint64_t out = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (has_edge(perm[i], perm[j])) out |= std::uint64_t{1} << pair_bit(i, j, k);
    }
  }
  GraphletCode result;
  result.k = k;
  result.bits = out;
  return result;
}

Graph Graph::from_edge_list(NodeId v, std::span<const Edge> edges) {
  Graph g;
  g.v_ = v;
  g.words_per_row_ = (static_cast<std::size_t>(v) + 63) / 64;
  g.rows_.assign(g.words_per_row_ * v, 0);

  std::vector<Edge> normalized;
  normalized.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a >= v || b >= v) {
      throw InputError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") has an endpoint outside [0, " + std::to_string(v) + ")");
    }
    if (a == b) throw InputError("self-loop on node " + std::to_string(a));
    normalized.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(normalized.begin(), normalized.end());
  normalized.erase(std::unique(normalized.begin(), normalized.end()), normalized.end());

  std::vector<std::size_t> degree(v, 0);
  for (auto [a, b] : normalized) {
    g.rows_[a * g.words_per_row_ + (b >> 6)] |= std::uint64_t{1} << (b & 63);
    g.rows_[b * g.words_per_row_ + (a >> 6)] |= std::uint64_t{1} << (a & 63);
    ++degree[a];
    ++degree[b];
  }
  g.edge_count_ = normalized.size();

  g.offsets_.assign(static_cast<std::size_t>(v) + 1, 0);
  for (NodeId a = 0; a < v; ++a) g.offsets_[a + 1] = g.offsets_[a] + degree[a];
  g.neighbors_.resize(g.offsets_[v]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Sorted edge order yields sorted neighbor lists.
  for (auto [a, b] : normalized) g.neighbors_[fill[a]++] = b;
  for (auto [a, b] : normalized) g.neighbors_[fill[b]++] = a;
  for (NodeId a = 0; a < v; ++a) {
    std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[a]),
              g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[a + 1]));
  }
  return g;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId a = 0; a < v_; ++a) {
    for (NodeId b : neighbors(a)) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

GraphletCode induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  const int k = static_cast<int>(nodes.size());
  if (k < 2 || k > kMaxGraphletSize) {
    throw InputError("graphlet size " + std::to_string(k) + " outside [2, 8]");
  }
  for (int i = 0; i < k; ++i) {
    if (nodes[i] >= g.node_count()) {
      throw InputError("node " + std::to_string(nodes[i]) + " out of range");
    }
    for (int j = 0; j < i; ++j) {
      if (nodes[i] == nodes[j]) {
        throw InputError("duplicate node " + std::to_string(nodes[i]) + " in subgraph");
      }
    }
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (g.has_edge(nodes[i], nodes[j])) bits |= std::uint64_t{1} << pair_bit(i, j, k);
    }
  }
  GraphletCode code;
  code.k = static_cast<std::uint8_t>(k);
  code.bits = bits;
  return code;
}

void flatten_adjacency(const GraphletCode& code, std::span<double> out) {
  const int k = code.k;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out[i * k + j] = code.has_edge(i, j) ? 1.0 : 0.0;
  }
}

std::vector<double> flatten_adjacency(const GraphletCode& code) {
  std::vector<double> out(static_cast<std::size_t>(code.k) * code.k);
  flatten_adjacency(code, out);
  return out;
}

Graph permute_graph(const Graph& g, std::span<const NodeId> perm) {
  const NodeId v = g.node_count();
  if (perm.size() != v) throw InputError("permutation length does not match node count");
  std::vector<NodeId> inverse(v, v);
  for (NodeId i = 0; i < v; ++i) {
    if (perm[i] >= v || inverse[perm[i]] != v) throw InputError("not a permutation");
    inverse[perm[i]] = i;
  }
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (auto [a, b] : g.edges()) edges.emplace_back(inverse[a], inverse[b]);
  return Graph::from_edge_list(v, edges);
}

bool is_connected(const GraphletCode& code) {
  const int k = code.k;
  if (k <= 1) return true;
  unsigned seen = 1U;
  unsigned frontier = 1U;
  while (frontier) {
    unsigned next = 0;
    for (int i = 0; i < k; ++i) {
      if (!((frontier >> i) & 1U)) continue;
      for (int j = 0; j < k; ++j) {
        if (code.has_edge(i, j) && !((seen >> j) & 1U)) next |= 1U << j;
      }
    }
    seen |= next;
    frontier = next;
  }
  return seen == (1U << k) - 1;
}

}  // namespace gsa
