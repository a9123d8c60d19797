#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gsa {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Largest supported graphlet size. 8*7/2 = 28 pair bits fit one word.
inline constexpr int kMaxGraphletSize = 8;

/// Bit position of node pair (i, j), i < j, inside a size-k graphlet code.
/// Pairs are laid out row by row: (0,1), (0,2), ..., (0,k-1), (1,2), ...
constexpr int pair_bit(int i, int j, int k) {
  return i * k - i * (i + 1) / 2 + (j - i - 1);
}

constexpr int pair_count(int k) { return k * (k - 1) / 2; }

/// Bit-packed upper-triangular adjacency of a k-node graph, 2 <= k <= 8.
struct GraphletCode {
  std::uint8_t k = 0;
  std::uint64_t bits = 0;

  GraphletCode() = default;
  GraphletCode(int size, std::uint64_t packed);

  bool has_edge(int i, int j) const;
  int edge_count() const;
  int degree(int i) const;

  /// Relabels nodes: node i of the result is node perm[i] of this graphlet.
  GraphletCode permuted(std::span<const int> perm) const;

  friend bool operator==(const GraphletCode&, const GraphletCode&) = default;
  friend auto operator<=>(const GraphletCode&, const GraphletCode&) = default;
};

/// Undirected simple graph on nodes 0..v-1. Immutable after construction.
///
/// Stores both adjacency bit rows (constant-time pair lookup for induced
/// subgraph extraction) and sorted neighbor lists (degree-time iteration for
/// random walks).
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an undirected edge list. Duplicate edges, in either
  /// direction, collapse. Throws InputError on self-loops or endpoints >= v.
  static Graph from_edge_list(NodeId v, std::span<const Edge> edges);

  NodeId node_count() const { return v_; }
  std::size_t edge_count() const { return edge_count_; }

  bool has_edge(NodeId a, NodeId b) const {
    return (rows_[a * words_per_row_ + (b >> 6)] >> (b & 63)) & 1U;
  }

  std::span<const NodeId> neighbors(NodeId a) const {
    return {neighbors_.data() + offsets_[a], neighbors_.data() + offsets_[a + 1]};
  }

  std::size_t degree(NodeId a) const { return offsets_[a + 1] - offsets_[a]; }

  /// Edges as (a, b) with a < b, sorted.
  std::vector<Edge> edges() const;

 private:
  NodeId v_ = 0;
  std::size_t edge_count_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
};

/// Code of the subgraph induced by `nodes`, labeled in the given order:
/// graphlet node i is graph node nodes[i]. Throws InputError on duplicate or
/// out-of-range ids, or a size outside [2, 8].
GraphletCode induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Row-major flattening of the full symmetric k x k 0/1 adjacency matrix.
std::vector<double> flatten_adjacency(const GraphletCode& code);
void flatten_adjacency(const GraphletCode& code, std::span<double> out);

/// Graph with node perm[i] of `g` renamed to i.
Graph permute_graph(const Graph& g, std::span<const NodeId> perm);

/// True when every node is reachable from node 0 (vacuously true for v <= 1).
bool is_connected(const GraphletCode& code);

}  // namespace gsa
