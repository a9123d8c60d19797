#include "gsa/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gsa/error.hpp"
#include "gsa/file_util.hpp"

namespace gsa {
namespace {

std::string where(const std::filesystem::path& file, std::size_t line) {
  return file.filename().string() + ":" + std::to_string(line);
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

// Parses "a, b" or "a b".
bool parse_pair(const std::string& line, long long& a, long long& b) {
  std::string cleaned = line;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::string rest;
  return static_cast<bool>(in >> a >> b) && !(in >> rest);
}

bool parse_single(const std::string& line, long long& value) {
  std::istringstream in(line);
  std::string rest;
  return static_cast<bool>(in >> value) && !(in >> rest);
}

void check_probability(const char* name, int cls, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << "_" << cls << " = " << p << " is outside [0, 1]";
    throw InputError(msg.str());
  }
}

}  // namespace

SbmProbabilities solve_sbm_probs(const SbmSpec& spec) {
  if (spec.communities == 0 || spec.v == 0 || spec.v % spec.communities != 0) {
    throw InputError("v=" + std::to_string(spec.v) + " is not divisible into " +
                     std::to_string(spec.communities) + " equal communities");
  }
  if (!(spec.r > 0.0)) throw InputError("similarity ratio r must be positive");
  const double block = static_cast<double>(spec.v / spec.communities);
  const double inside = block - 1.0;
  const double across = static_cast<double>(spec.v) - block;
  if (across <= 0.0) throw InputError("SBM needs at least two communities");

  SbmProbabilities probs;
  probs.p_in[1] = spec.p_in_1;
  probs.p_in[0] = spec.p_in_1 / spec.r;
  for (int cls = 0; cls < 2; ++cls) {
    probs.p_out[cls] = (spec.expected_degree - inside * probs.p_in[cls]) / across;
    check_probability("p_in", cls, probs.p_in[cls]);
    check_probability("p_out", cls, probs.p_out[cls]);
  }
  return probs;
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
  LabeledDataset out;
  out.name = name;
  out.provenance = provenance;
  for (std::size_t i : indices) {
    out.graphs.push_back(graphs.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

Graph generate_sbm_graph(NodeId v, NodeId communities, double p_in, double p_out,
                         RngStream& rng) {
  const NodeId block = v / communities;
  std::vector<Edge> edges;
  for (NodeId a = 0; a < v; ++a) {
    for (NodeId b = a + 1; b < v; ++b) {
      const double p = (a / block == b / block) ? p_in : p_out;
      if (rng.bernoulli(p)) edges.emplace_back(a, b);
    }
  }
  return Graph::from_edge_list(v, edges);
}

Graph erdos_renyi(NodeId v, double p, RngStream& rng) {
  std::vector<Edge> edges;
  for (NodeId a = 0; a < v; ++a) {
    for (NodeId b = a + 1; b < v; ++b) {
      if (rng.bernoulli(p)) edges.emplace_back(a, b);
    }
  }
  return Graph::from_edge_list(v, edges);
}

LabeledDataset generate_sbm(const SbmSpec& spec) {
  const SbmProbabilities probs = solve_sbm_probs(spec);
  if (spec.n_graphs < 2 || spec.n_graphs % 2 != 0) {
    throw InputError("SBM dataset needs an even number of graphs >= 2");
  }
  LabeledDataset data;
  data.name = "sbm";
  std::ostringstream prov;
  prov.precision(17);
  prov << "sbm(n_graphs=" << spec.n_graphs << ",v=" << spec.v
       << ",communities=" << spec.communities << ",degree=" << spec.expected_degree
       << ",p_in_1=" << spec.p_in_1 << ",r=" << spec.r << ",seed=" << spec.seed << ")";
  data.provenance = prov.str();
  data.graphs.reserve(spec.n_graphs);
  for (std::size_t i = 0; i < spec.n_graphs; ++i) {
    const int cls = i < spec.n_graphs / 2 ? 0 : 1;
    RngStream rng(spec.seed, stream_id(StreamTag::kDataset, i));
    data.graphs.push_back(
        generate_sbm_graph(spec.v, spec.communities, probs.p_in[cls], probs.p_out[cls], rng));
    data.labels.push_back(cls == 0 ? -1 : +1);
  }
  return data;
}

LabeledDataset load_tu_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("TU dataset directory not found: " + dir.string());
  std::string ds;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    if (file.size() > 6 && file.ends_with("_A.txt")) {
      if (!ds.empty()) throw InputError("several *_A.txt files in " + dir.string());
      ds = file.substr(0, file.size() - 6);
    }
  }
  if (ds.empty()) throw InputError("no *_A.txt edge file in " + dir.string());

  auto open = [&](const std::string& suffix) {
    const fs::path path = dir / (ds + suffix);
    std::ifstream in(path);
    if (!in) throw InputError("missing TU file " + path.string());
    return std::make_pair(path, std::move(in));
  };

  // Node -> graph map. Graph ids must be 1..G with contiguous node blocks.
  auto [indicator_path, indicator_in] = open("_graph_indicator.txt");
  std::vector<std::size_t> graph_of;  // 0-based graph per 0-based node
  std::vector<NodeId> local_id;
  std::vector<NodeId> node_count;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(indicator_in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    long long gid = 0;
    if (!parse_single(line, gid)) {
      throw InputError(where(indicator_path, line_no) + ": expected one graph id");
    }
    const long long expected_new = static_cast<long long>(node_count.size()) + 1;
    if (gid == expected_new) {
      node_count.push_back(0);
    } else if (node_count.empty() || gid != expected_new - 1) {
      throw InputError(where(indicator_path, line_no) + ": graph id " + std::to_string(gid) +
                       " is not contiguous (expected " + std::to_string(expected_new - 1) +
                       " or " + std::to_string(expected_new) + ")");
    }
    graph_of.push_back(static_cast<std::size_t>(gid - 1));
    local_id.push_back(node_count.back()++);
  }
  if (node_count.empty()) throw InputError(indicator_path.string() + " lists no nodes");

  auto [labels_path, labels_in] = open("_graph_labels.txt");
  std::vector<long long> raw_labels;
  line_no = 0;
  while (std::getline(labels_in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    long long label = 0;
    if (!parse_single(line, label)) {
      throw InputError(where(labels_path, line_no) + ": expected one integer label");
    }
    raw_labels.push_back(label);
  }
  if (raw_labels.size() != node_count.size()) {
    throw InputError(labels_path.string() + " has " + std::to_string(raw_labels.size()) +
                     " labels for " + std::to_string(node_count.size()) + " graphs");
  }
  std::vector<long long> distinct = raw_labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() != 2) {
    throw InputError(labels_path.string() + " has " + std::to_string(distinct.size()) +
                     " distinct labels; only binary datasets are supported");
  }

  auto [edges_path, edges_in] = open("_A.txt");
  std::vector<std::vector<Edge>> edges(node_count.size());
  line_no = 0;
  const long long total_nodes = static_cast<long long>(graph_of.size());
  while (std::getline(edges_in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    long long a = 0;
    long long b = 0;
    if (!parse_pair(line, a, b)) {
      throw InputError(where(edges_path, line_no) + ": expected 'i, j'");
    }
    if (a < 1 || b < 1 || a > total_nodes || b > total_nodes) {
      throw InputError(where(edges_path, line_no) + ": node id out of range");
    }
    const auto ga = graph_of[a - 1];
    const auto gb = graph_of[b - 1];
    if (ga != gb) {
      throw InputError(where(edges_path, line_no) + ": edge crosses graphs " +
                       std::to_string(ga + 1) + " and " + std::to_string(gb + 1));
    }
    if (a == b) continue;
    edges[ga].emplace_back(local_id[a - 1], local_id[b - 1]);
  }

  LabeledDataset data;
  data.name = ds;
  data.provenance = "tu:" + dir.string();
  for (std::size_t g = 0; g < node_count.size(); ++g) {
    data.graphs.push_back(Graph::from_edge_list(node_count[g], edges[g]));
    data.labels.push_back(raw_labels[g] == distinct[0] ? -1 : +1);
  }
  return data;
}

void write_tu_dataset(const LabeledDataset& data, const std::filesystem::path& dir,
                      const std::string& ds_name) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / (ds_name + "_A.txt"), [&](std::ostream& out) {
    std::size_t offset = 1;
    for (const Graph& g : data.graphs) {
      for (auto [a, b] : g.edges()) {
        out << offset + a << ", " << offset + b << '\n';
        out << offset + b << ", " << offset + a << '\n';
      }
      offset += g.node_count();
    }
  });
  write_file_atomic(dir / (ds_name + "_graph_indicator.txt"), [&](std::ostream& out) {
    for (std::size_t g = 0; g < data.graphs.size(); ++g) {
      for (NodeId a = 0; a < data.graphs[g].node_count(); ++a) out << g + 1 << '\n';
    }
  });
  write_file_atomic(dir / (ds_name + "_graph_labels.txt"), [&](std::ostream& out) {
    for (int label : data.labels) out << label << '\n';
  });
}

void write_edge_list_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, [&](std::ostream& out) {
    out << "# dataset " << data.name << '\n';
    out << "# provenance " << data.provenance << '\n';
    for (std::size_t g = 0; g < data.graphs.size(); ++g) {
      out << "# graph " << g << ' ' << data.labels[g] << ' ' << data.graphs[g].node_count()
          << '\n';
      for (auto [a, b] : data.graphs[g].edges()) out << a << ' ' << b << '\n';
    }
  });
}

LabeledDataset read_edge_list_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset file " + path.string());
  LabeledDataset data;
  data.name = path.stem().string();
  data.provenance = "edge-list:" + path.string();

  struct Pending {
    int label = 0;
    long long v = -1;
    std::vector<Edge> edges;
    NodeId max_node = 0;
    bool any = false;
  };
  std::vector<Pending> pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      std::istringstream header(t.substr(1));
      std::string word;
      header >> word;
      if (word == "dataset") {
        header >> data.name;
      } else if (word == "provenance") {
        std::getline(header >> std::ws, data.provenance);
      } else if (word == "graph") {
        long long id = 0;
        long long label = 0;
        Pending p;
        if (!(header >> id >> label) || (label != -1 && label != 1)) {
          throw InputError(where(path, line_no) + ": expected '# graph <id> <label> [v]'");
        }
        if (id != static_cast<long long>(pending.size())) {
          throw InputError(where(path, line_no) + ": graph ids must be 0, 1, 2, ...");
        }
        p.label = static_cast<int>(label);
        header >> p.v;
        pending.push_back(std::move(p));
      }
      continue;
    }
    if (pending.empty()) throw InputError(where(path, line_no) + ": edge before any graph header");
    long long a = 0;
    long long b = 0;
    if (!parse_pair(t, a, b) || a < 0 || b < 0) {
      throw InputError(where(path, line_no) + ": expected 'u w'");
    }
    auto& p = pending.back();
    if (p.v >= 0 && (a >= p.v || b >= p.v)) {
      throw InputError(where(path, line_no) + ": node id exceeds the graph's node count");
    }
    p.edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    p.max_node = std::max<NodeId>(p.max_node, static_cast<NodeId>(std::max(a, b)));
    p.any = true;
  }
  for (auto& p : pending) {
    const NodeId v = p.v >= 0 ? static_cast<NodeId>(p.v) : (p.any ? p.max_node + 1 : 0);
    data.graphs.push_back(Graph::from_edge_list(v, p.edges));
    data.labels.push_back(p.label);
  }
  return data;
}

SplitIndices split_indices(const LabeledDataset& data, double train_fraction,
                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train fraction must lie strictly between 0 and 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.labels.size(); ++i) by_class[data.labels[i]].push_back(i);
  if (by_class.size() < 2) throw InputError("split needs both classes present");

  RngStream rng(seed, stream_id(StreamTag::kSplit, 0));
  SplitIndices out;
  for (auto& [label, members] : by_class) {
    if (members.size() < 2) {
      throw InputError("class " + std::to_string(label) + " has fewer than 2 members");
    }
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      std::swap(members[i], members[rng.below(i + 1)]);
    }
    auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, members.size() - 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + n_train);
    out.test.insert(out.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& data,
                                                double train_fraction, std::uint64_t seed) {
  const auto idx = split_indices(data, train_fraction, seed);
  return {data.subset(idx.train), data.subset(idx.test)};
}

std::vector<std::pair<std::string, std::string>> read_key_values(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos || trim(body.substr(0, eq)).empty()) {
      throw InputError(where(path, line_no) + ": expected key=value");
    }
    out.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  return out;
}

}  // namespace gsa
