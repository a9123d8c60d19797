#include "gsa/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gsa/error.hpp"
#include "gsa/file_util.hpp"
#include "gsa/parallel.hpp"

namespace gsa {
namespace {

double binomial(double n, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

Embedding gsa_embed(const Graph& g, const SamplerSpec& sampler, const RealizedMap& map,
                    std::size_t s, RngStream& rng) {
  if (s == 0) throw InputError("sample count s must be at least 1");
  if (sampler.k != map.spec().k) throw InputError("sampler k and feature map k differ");

  std::vector<std::uint64_t> codes(s);
  for (auto& code : codes) code = sample_graphlet(g, sampler, rng).bits;
  std::sort(codes.begin(), codes.end());

  Embedding out;
  out.values.assign(map.output_dim(), 0.0);
  out.map_fingerprint = map.spec().fingerprint();
  out.sampler = sampler;
  out.samples = s;

  std::vector<double> phi(map.output_dim());
  for (std::size_t i = 0; i < codes.size();) {
    std::size_t j = i;
    while (j < codes.size() && codes[j] == codes[i]) ++j;
    const auto count = static_cast<double>(j - i);
    GraphletCode code;
    code.k = static_cast<std::uint8_t>(sampler.k);
    code.bits = codes[i];
    if (map.spec().kind == MapKind::kMatch) {
      out.values[phi_match_index(map, code)] += count;
    } else {
      map.evaluate(code, phi);
      for (std::size_t c = 0; c < phi.size(); ++c) out.values[c] += count * phi[c];
    }
    i = j;
  }
  const auto denom = static_cast<double>(s);
  for (double& value : out.values) value /= denom;
  return out;
}

std::string exact_spectrum_fingerprint(int k) { return "match;k=" + std::to_string(k); }

Embedding exact_spectrum(const Graph& g, const Atlas& atlas) {
  const int k = atlas.k();
  const NodeId v = g.node_count();
  if (v < static_cast<NodeId>(k)) {
    throw InputError("graph has " + std::to_string(v) + " nodes, fewer than k=" +
                     std::to_string(k));
  }
  const double subsets = binomial(v, k);
  if (subsets > kExactSpectrumLimit) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0f", subsets);
    throw InputError(std::string("exact spectrum needs C(v,k) = ") + buf +
                     " subsets, above the 1e7 limit");
  }

  std::vector<std::uint64_t> counts(atlas.size(), 0);
  std::unordered_map<std::uint64_t, std::size_t> class_of;
  std::vector<NodeId> nodes(k);
  for (int i = 0; i < k; ++i) nodes[i] = static_cast<NodeId>(i);
  std::uint64_t total = 0;
  while (true) {
    const GraphletCode code = induced_subgraph(g, nodes);
    auto it = class_of.find(code.bits);
    if (it == class_of.end()) it = class_of.emplace(code.bits, atlas.match_index(code)).first;
    ++counts[it->second];
    ++total;
    // Next combination in lexicographic order.
    int i = k - 1;
    while (i >= 0 && nodes[i] == v - static_cast<NodeId>(k - i)) --i;
    if (i < 0) break;
    ++nodes[i];
    for (int j = i + 1; j < k; ++j) nodes[j] = nodes[j - 1] + 1;
  }

  Embedding out;
  out.values.resize(atlas.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out.values[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  out.map_fingerprint = exact_spectrum_fingerprint(k);
  out.sampler.k = k;
  out.samples = 0;
  return out;
}

double mmd_sq_estimate(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw InputError("embeddings have different lengths");
  }
  if (a.map_fingerprint != b.map_fingerprint) {
    throw InputError("embeddings come from different feature maps (" + a.map_fingerprint +
                     " vs " + b.map_fingerprint + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double diff = a.values[i] - b.values[i];
    sum += diff * diff;
  }
  return sum;
}

double theorem1_bound(double m, double s, double delta, double feature_bound) {
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (!(m >= 1.0 && s >= 1.0)) throw InputError("m and s must be at least 1");
  const double b2 = feature_bound * feature_bound;
  const double feature_term = 4.0 * std::sqrt(std::log(6.0 / delta)) / std::sqrt(m);
  const double sample_term = 8.0 * (1.0 + std::sqrt(2.0 * std::log(3.0 / delta))) / std::sqrt(s);
  return b2 * (feature_term + sample_term);
}

double ConcentrationReport::median_deviation() const {
  if (deviations.empty()) return 0.0;
  std::vector<double> sorted = deviations;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

ConcentrationReport run_concentration_trials(const Graph& g, const Graph& g2,
                                             const ConcentrationConfig& config,
                                             std::shared_ptr<const Atlas> atlas) {
  if (config.trials == 0) throw InputError("need at least one trial");
  const bool match = config.map.kind == MapKind::kMatch;
  if (match && !atlas) atlas = std::make_shared<const Atlas>(build_atlas(config.map.k));

  ConcentrationReport report;
  report.trials = config.trials;
  report.s = config.s;
  report.delta = config.delta;
  report.feature_bound = config.feature_bound;

  // Reference MMD^2.
  const std::size_t scale = std::max<std::size_t>(config.reference_scale, 1);
  const int k = config.map.k;
  const bool exact_ok = match && binomial(g.node_count(), k) <= kExactSpectrumLimit &&
                        binomial(g2.node_count(), k) <= kExactSpectrumLimit;
  if (exact_ok) {
    report.reference_mmd_sq = mmd_sq_estimate(exact_spectrum(g, *atlas), exact_spectrum(g2, *atlas));
    report.reference_m = atlas->size();
    report.reference_s = 0;
  } else {
    FeatureMapSpec ref_spec = config.map;
    ref_spec.m = match ? 0 : scale * config.m;
    ref_spec.seed = splitmix64(config.seed ^ 0x5eed5eed5eed5eedULL);
    const RealizedMap ref_map = realize(ref_spec, atlas);
    // Both graphs replay one stream, so identical graphs give exactly zero.
    RngStream r1(config.seed, stream_id(StreamTag::kTrial, 0xfffffffeULL));
    RngStream r2(config.seed, stream_id(StreamTag::kTrial, 0xfffffffeULL));
    const auto e1 = gsa_embed(g, config.sampler, ref_map, scale * config.s, r1);
    const auto e2 = gsa_embed(g2, config.sampler, ref_map, scale * config.s, r2);
    report.reference_mmd_sq = mmd_sq_estimate(e1, e2);
    report.reference_m = ref_map.output_dim();
    report.reference_s = scale * config.s;
  }

  report.distances.assign(config.trials, 0.0);
  report.deviations.assign(config.trials, 0.0);
  std::size_t m_used = config.m;
  parallel_for(config.trials, config.threads, [&](std::size_t t) {
    FeatureMapSpec spec = config.map;
    spec.m = match ? 0 : config.m;
    spec.seed = splitmix64(config.seed ^ splitmix64(t + 1));
    const RealizedMap map = realize(spec, atlas);
    RngStream r1(config.seed, stream_id(StreamTag::kTrial, 2 * t));
    RngStream r2(config.seed, stream_id(StreamTag::kTrial, 2 * t + 1));
    const auto e1 = gsa_embed(g, config.sampler, map, config.s, r1);
    const auto e2 = gsa_embed(g2, config.sampler, map, config.s, r2);
    const double distance = mmd_sq_estimate(e1, e2);
    report.distances[t] = distance;
    report.deviations[t] = std::abs(distance - report.reference_mmd_sq);
  });
  if (match) m_used = atlas->size();
  report.m = m_used;
  report.bound = theorem1_bound(static_cast<double>(report.m), static_cast<double>(config.s),
                                config.delta, config.feature_bound);
  std::size_t violations = 0;
  for (double d : report.deviations) violations += d > report.bound ? 1 : 0;
  report.violation_rate = static_cast<double>(violations) / static_cast<double>(config.trials);
  return report;
}

std::vector<Embedding> embed_dataset(const LabeledDataset& data, const SamplerSpec& sampler,
                                     const RealizedMap& map, std::size_t s, std::uint64_t seed,
                                     unsigned threads, std::vector<std::size_t>* skipped) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.graphs[i].node_count() >= static_cast<NodeId>(sampler.k)) {
      kept.push_back(i);
    } else if (skipped) {
      skipped->push_back(i);
    }
  }
  std::vector<Embedding> out(kept.size());
  parallel_for(kept.size(), threads, [&](std::size_t slot) {
    const std::size_t i = kept[slot];
    RngStream rng(seed, stream_id(StreamTag::kSampling, i));
    out[slot] = gsa_embed(data.graphs[i], sampler, map, s, rng);
    out[slot].graph_id = i;
  });
  return out;
}

std::vector<Embedding> exact_spectra_dataset(const LabeledDataset& data, const Atlas& atlas,
                                             unsigned threads,
                                             std::vector<std::size_t>* skipped) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.graphs[i].node_count() >= static_cast<NodeId>(atlas.k())) {
      kept.push_back(i);
    } else if (skipped) {
      skipped->push_back(i);
    }
  }
  std::vector<Embedding> out(kept.size());
  parallel_for(kept.size(), threads, [&](std::size_t slot) {
    out[slot] = exact_spectrum(data.graphs[kept[slot]], atlas);
    out[slot].graph_id = kept[slot];
  });
  return out;
}

void write_embeddings_csv(const std::vector<Embedding>& rows, const std::vector<int>& labels,
                          const std::filesystem::path& path) {
  const std::size_t m = rows.empty() ? 0 : rows.front().values.size();
  write_file_atomic(path, [&](std::ostream& out) {
    out << "graph_id,label";
    for (std::size_t c = 0; c < m; ++c) out << ",f_" << c;
    out << '\n';
    for (const auto& row : rows) {
      out << row.graph_id << ',' << labels.at(row.graph_id);
      for (double value : row.values) out << ',' << format_double(value);
      out << '\n';
    }
  });
}

EmbeddingMatrix read_embeddings_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("graph_id,label")) {
    throw InputError(path.string() + ": missing graph_id,label header");
  }
  const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  const std::size_t m = columns - 1;
  EmbeddingMatrix out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != m + 2) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(m + 2) + " columns");
    }
    try {
      out.graph_ids.push_back(std::stoull(cells[0]));
      out.labels.push_back(std::stoi(cells[1]));
      std::vector<double> values(m);
      for (std::size_t c = 0; c < m; ++c) values[c] = std::stod(cells[c + 2]);
      out.rows.push_back(std::move(values));
    } catch (const std::logic_error&) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

}  // namespace gsa
