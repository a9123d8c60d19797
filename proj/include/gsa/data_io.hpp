#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gsa/graph.hpp"
#include "gsa/rng.hpp"

namespace gsa {

/// Two-class stochastic block model with equal expected degree in both classes.
struct SbmSpec {
  std::size_t n_graphs = 300;
  NodeId v = 60;
  NodeId communities = 6;
  double expected_degree = 10.0;
  double p_in_1 = 0.3;
  /// Inter-class similarity p_in_1 / p_in_0; 1 makes the classes identical.
  double r = 1.1;
  std::uint64_t seed = 0;
};

struct SbmProbabilities {
  double p_in[2] = {0.0, 0.0};
  double p_out[2] = {0.0, 0.0};
};

/// Solves d = (c_s - 1) p_in + (v - c_s) p_out for each class, with
/// p_in_0 = p_in_1 / r and c_s = v / communities. Throws InputError naming the
/// offending value if a probability leaves [0, 1] or the spec is malformed.
SbmProbabilities solve_sbm_probs(const SbmSpec& spec);

/// Binary-labeled graph collection. Labels are -1 or +1.
struct LabeledDataset {
  std::vector<Graph> graphs;
  std::vector<int> labels;
  std::string name;
  std::string provenance;

  std::size_t size() const { return graphs.size(); }
  LabeledDataset subset(const std::vector<std::size_t>& indices) const;
};

/// First n/2 graphs are class 0 (label -1), the rest class 1 (label +1).
/// Graph i draws from stream (seed, dataset/i).
LabeledDataset generate_sbm(const SbmSpec& spec);

/// Single SBM graph with explicit block probabilities.
Graph generate_sbm_graph(NodeId v, NodeId communities, double p_in, double p_out,
                         RngStream& rng);

Graph erdos_renyi(NodeId v, double p, RngStream& rng);

/// Reads DS_A.txt, DS_graph_indicator.txt and DS_graph_labels.txt from `dir`
/// (DS inferred from the *_A.txt file). Node ids are remapped densely per
/// graph, edges deduplicated and symmetrized, self-loops dropped, and the two
/// original labels mapped to -1 / +1 in sorted order. Attribute files are
/// ignored. Errors carry file and line.
LabeledDataset load_tu_dataset(const std::filesystem::path& dir);

/// Writes the TU layout; original labels are written as -1 / +1.
void write_tu_dataset(const LabeledDataset& data, const std::filesystem::path& dir,
                      const std::string& ds_name);

/// Edge-list cache: one "# graph <id> <label> <v>" header per graph followed
/// by 0-indexed "u w" lines.
void write_edge_list_dataset(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset read_edge_list_dataset(const std::filesystem::path& path);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified split: each class is shuffled and its first
/// round(fraction * count) members go to train. Indices come back ascending.
/// Throws InputError if a class has fewer than 2 members.
SplitIndices split_indices(const LabeledDataset& data, double train_fraction,
                           std::uint64_t seed);
std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                double train_fraction, std::uint64_t seed);

/// key=value lines; '#' starts a comment. Keys keep file order.
std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path);

}  // namespace gsa
