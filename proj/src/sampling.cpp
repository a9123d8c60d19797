#include "gsa/sampling.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "gsa/error.hpp"

namespace gsa {
namespace {

void check_size(const Graph& g, int k) {
  if (k < 2 || k > kMaxGraphletSize) {
    throw InputError("sample size k=" + std::to_string(k) + " outside [2, 8]");
  }
  if (g.node_count() < static_cast<NodeId>(k)) {
    throw InputError("graph has " + std::to_string(g.node_count()) + " nodes, fewer than k=" +
                     std::to_string(k));
  }
}

bool contains(const std::vector<NodeId>& nodes, NodeId x) {
  return std::find(nodes.begin(), nodes.end(), x) != nodes.end();
}

}  // namespace

std::string to_string(SamplerKind kind) {
  return kind == SamplerKind::kUniform ? "uniform" : "rw";
}

SamplerKind parse_sampler_kind(const std::string& text) {
  if (text == "uniform" || text == "unif") return SamplerKind::kUniform;
  if (text == "rw" || text == "random-walk") return SamplerKind::kRandomWalk;
  throw InputError("unknown sampler '" + text + "' (expected uniform or rw)");
}

std::vector<NodeId> sample_uniform(const Graph& g, int k, RngStream& rng) {
  check_size(g, k);
  const NodeId v = g.node_count();
  // Sparse record of the swapped slots of the virtual array [0, v).
  std::array<std::pair<NodeId, NodeId>, 2 * kMaxGraphletSize> swapped{};
  int swapped_count = 0;
  auto slot = [&](NodeId pos) {
    for (int i = swapped_count - 1; i >= 0; --i) {
      if (swapped[i].first == pos) return swapped[i].second;
    }
    return pos;
  };
  std::vector<NodeId> out(k);
  for (int i = 0; i < k; ++i) {
    const NodeId pos = static_cast<NodeId>(i);
    const NodeId pick = pos + static_cast<NodeId>(rng.below(v - pos));
    const NodeId chosen = slot(pick);
    swapped[swapped_count++] = {pick, slot(pos)};
    out[i] = chosen;
  }
  return out;
}

std::vector<NodeId> sample_rw(const Graph& g, const SamplerSpec& spec, RngStream& rng) {
  const int k = spec.k;
  check_size(g, k);
  const NodeId v = g.node_count();
  const std::uint64_t per_walk =
      spec.rw_max_steps ? spec.rw_max_steps : 100ULL * static_cast<std::uint64_t>(k) * v;
  if (per_walk < static_cast<std::uint64_t>(k)) {
    throw InputError("rw_max_steps must be at least k");
  }
  const std::uint64_t global_budget = 10 * per_walk;

  std::vector<NodeId> collected;
  collected.reserve(k);
  std::uint64_t total_steps = 0;
  while (total_steps < global_budget) {
    collected.clear();
    NodeId current = static_cast<NodeId>(rng.below(v));
    collected.push_back(current);
    ++total_steps;  // a restart costs one step so isolated-node loops terminate
    std::uint64_t walk_steps = 0;
    while (static_cast<int>(collected.size()) < k && walk_steps < per_walk &&
           total_steps < global_budget) {
      const auto nbrs = g.neighbors(current);
      if (nbrs.empty()) break;
      current = nbrs[rng.below(nbrs.size())];
      ++walk_steps;
      ++total_steps;
      if (!contains(collected, current)) collected.push_back(current);
    }
    if (static_cast<int>(collected.size()) == k) return collected;
  }

  // Budget exhausted: top up with uniform picks among unvisited nodes.
  std::vector<NodeId> unvisited;
  unvisited.reserve(v - collected.size());
  for (NodeId a = 0; a < v; ++a) {
    if (!contains(collected, a)) unvisited.push_back(a);
  }
  while (static_cast<int>(collected.size()) < k) {
    const auto pick = rng.below(unvisited.size());
    collected.push_back(unvisited[pick]);
    unvisited[pick] = unvisited.back();
    unvisited.pop_back();
  }
  return collected;
}

std::vector<NodeId> sample_nodes(const Graph& g, const SamplerSpec& spec, RngStream& rng) {
  return spec.kind == SamplerKind::kUniform ? sample_uniform(g, spec.k, rng)
                                            : sample_rw(g, spec, rng);
}

GraphletCode sample_graphlet(const Graph& g, const SamplerSpec& spec, RngStream& rng) {
  const auto nodes = sample_nodes(g, spec, rng);
  return induced_subgraph(g, nodes);
}

}  // namespace gsa
