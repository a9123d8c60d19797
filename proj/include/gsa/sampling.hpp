#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsa/graph.hpp"
#include "gsa/rng.hpp"

namespace gsa {

enum class SamplerKind { kUniform, kRandomWalk };

std::string to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(const std::string& text);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kUniform;
  int k = 3;
  /// Steps per walk before a restart; 0 selects the default 100 * k * v.
  std::uint64_t rw_max_steps = 0;
};

/// k distinct nodes, every k-subset equally likely, in the order drawn
/// (partial Fisher-Yates over a virtual identity array).
std::vector<NodeId> sample_uniform(const Graph& g, int k, RngStream& rng);

/// Random-walk sampler.
///
/// A walk starts at a uniform node and steps to a uniform neighbor, collecting
/// distinct nodes in visit order until it holds k. Hitting an isolated node or
/// running out of per-walk steps discards the walk and restarts from a fresh
/// uniform node. The restarts share a global budget of 10 * rw_max_steps
/// steps; if that runs out, the last walk's nodes are topped up with uniform
/// picks from the nodes it did not visit. Without top-up the induced subgraph
/// is connected.
std::vector<NodeId> sample_rw(const Graph& g, const SamplerSpec& spec, RngStream& rng);

std::vector<NodeId> sample_nodes(const Graph& g, const SamplerSpec& spec, RngStream& rng);

/// Samples nodes and returns the induced code, labeled in sample order.
GraphletCode sample_graphlet(const Graph& g, const SamplerSpec& spec, RngStream& rng);

}  // namespace gsa
