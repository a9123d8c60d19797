#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsa/commands.hpp"
#include "gsa/error.hpp"

namespace {

using gsa::cli::DatasetKind;
using gsa::cli::ExperimentConfig;

struct ExperimentFlags {
  std::string sampler = "uniform";
  std::string map = "gaussian";
  std::string tu;
  std::string edge_list;
  int k = 5;
};

void add_dataset_options(CLI::App* app, ExperimentConfig& config, ExperimentFlags& flags) {
  auto& sbm = config.dataset.sbm;
  app->add_option("--n-graphs", sbm.n_graphs, "SBM: number of graphs (half per class)");
  app->add_option("--v", sbm.v, "SBM: nodes per graph");
  app->add_option("--communities", sbm.communities, "SBM: communities per graph");
  app->add_option("--degree", sbm.expected_degree, "SBM: expected node degree");
  app->add_option("--p-in-1", sbm.p_in_1, "SBM: intra-community probability of class +1");
  app->add_option("--r", sbm.r, "SBM: class similarity p_in_1 / p_in_0");
  app->add_option("--tu", flags.tu, "TU dataset directory instead of SBM");
  app->add_option("--edge-list", flags.edge_list, "cached edge-list dataset instead of SBM");
}

void add_embedding_options(CLI::App* app, ExperimentConfig& config, ExperimentFlags& flags) {
  add_dataset_options(app, config, flags);
  config.map.m = 5000;
  app->add_option("--k", flags.k, "graphlet size (2..8)");
  app->add_option("--sampler", flags.sampler, "uniform | rw")
      ->check(CLI::IsMember({"uniform", "rw"}));
  app->add_option("--rw-max-steps", config.sampler.rw_max_steps,
                  "random-walk step budget per walk (0 = 100 k v)");
  app->add_option("--map", flags.map, "match | gaussian | gaussian-eig | opu")
      ->check(CLI::IsMember({"match", "gaussian", "gaussian-eig", "opu"}));
  app->add_option("--m", config.map.m, "number of random features");
  app->add_option("--s", config.s, "graphlet samples per graph");
  app->add_option("--sigma2", config.map.sigma2, "Gaussian weight variance");
  app->add_option("--opu-bias-var", config.map.opu_bias_variance,
                  "variance of the simulated OPU bias (0 = no bias)");
  app->add_flag("--exact", config.exact, "match only: exact k-spectra instead of sampling");
  app->add_option("--atlas-dir", config.atlas_dir, "atlas cache directory (default: --out)");
}

void finish_experiment(ExperimentConfig& config, const ExperimentFlags& flags) {
  if (!flags.tu.empty() && !flags.edge_list.empty()) {
    throw gsa::InputError("--tu and --edge-list are mutually exclusive");
  }
  if (!flags.tu.empty()) {
    config.dataset.kind = DatasetKind::kTu;
    config.dataset.path = flags.tu;
  } else if (!flags.edge_list.empty()) {
    config.dataset.kind = DatasetKind::kEdgeList;
    config.dataset.path = flags.edge_list;
  }
  config.sampler.kind = gsa::parse_sampler_kind(flags.sampler);
  config.map.kind = gsa::parse_map_kind(flags.map);
  config.sampler.k = flags.k;
  config.map.k = flags.k;
  config.map.seed = config.seed;
  if (config.map.kind == gsa::MapKind::kMatch) config.map.m = 0;
}

/// Applies config-file keys to options that were not given on the command line.
/// Keys that belong to another subcommand are ignored so one file can serve
/// several commands; keys no command knows are errors.
void apply_config_file(CLI::App& app, CLI::App* sub, const std::string& path) {
  auto find = [](CLI::App* scope, const std::string& name) -> CLI::Option* {
    try {
      return scope->get_option(name);
    } catch (const CLI::OptionNotFound&) {
      return nullptr;
    }
  };
  for (const auto& [key, value] : gsa::read_key_values(path)) {
    const std::string name = "--" + key;
    CLI::Option* opt = find(sub, name);
    if (!opt) opt = find(&app, name);
    if (!opt) {
      bool known = false;
      for (CLI::App* other : app.get_subcommands({})) known = known || find(other, name);
      if (!known) throw gsa::InputError("unknown key '" + key + "' in config file " + path);
      continue;
    }
    if (opt->count() > 0 || key == "config") continue;
    const bool is_flag = opt->get_expected_max() == 0;
    if (is_flag && value != "1" && value != "true" && value != "0" && value != "false") {
      throw gsa::InputError("config key '" + key + "' expects true/false");
    }
    std::stringstream cells(value);
    std::string cell;
    bool any = false;
    while (std::getline(cells, cell, ',')) {
      opt->add_result(is_flag ? (cell == "1" || cell == "true" ? "true" : "false") : cell);
      any = true;
    }
    if (!any) throw gsa::InputError("config key '" + key + "' has no value");
    opt->run_callback();
  }
}

template <class T>
std::vector<T> parse_list(const std::vector<std::string>& raw) {
  std::vector<T> out;
  for (const auto& cell : raw) {
    std::stringstream in(cell);
    T value{};
    if (!(in >> value) || !in.eof()) throw gsa::InputError("bad list value '" + cell + "'");
    out.push_back(value);
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Graphlet sampling and averaging: graph embeddings and classification"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string config_path;
  std::string out = "gsa_out";
  unsigned threads = 1;
  app.add_option("--seed", seed, "master seed");
  app.add_option("--config", config_path, "key=value file; flags override it");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));

  int atlas_k = 5;
  auto* atlas_cmd = app.add_subcommand("atlas", "enumerate non-isomorphic k-graphlets");
  atlas_cmd->add_option("--k", atlas_k, "graphlet size (2..8)");

  ExperimentConfig gen_config;
  ExperimentFlags gen_flags;
  auto* gen_cmd = app.add_subcommand("gen-sbm", "write an SBM dataset as an edge list");
  add_dataset_options(gen_cmd, gen_config, gen_flags);

  ExperimentConfig embed_config;
  ExperimentFlags embed_flags;
  auto* embed_cmd = app.add_subcommand("embed", "embed every graph of a dataset");
  add_embedding_options(embed_cmd, embed_config, embed_flags);

  ExperimentConfig te_config;
  ExperimentFlags te_flags;
  std::vector<std::string> r_list;
  std::vector<std::string> m_list;
  bool no_standardize = false;
  auto* te_cmd = app.add_subcommand("train-eval", "embed, split, train and evaluate");
  add_embedding_options(te_cmd, te_config, te_flags);
  te_cmd->add_option("--lambda", te_config.classifier.lambda, "L2 strength (0 = 1/n)");
  te_cmd->add_option("--epochs", te_config.classifier.epochs, "SGD epochs");
  te_cmd->add_flag("--no-standardize", no_standardize, "train on raw coordinates");
  te_cmd->add_option("--train-fraction", te_config.train_fraction, "stratified train share");
  te_cmd->add_option("--reps", te_config.repetitions, "repetitions (seed, seed+1, ...)");
  te_cmd->add_option("--r-list", r_list, "SBM r grid, comma separated")->delimiter(',');
  te_cmd->add_option("--m-list", m_list, "feature-count grid, comma separated")->delimiter(',');

  gsa::cli::BenchConfig bench_config;
  std::vector<std::string> bench_k;
  std::vector<std::string> bench_maps;
  auto* bench_cmd = app.add_subcommand("bench", "time each feature map per graphlet");
  bench_cmd->add_option("--k-list", bench_k, "graphlet sizes, comma separated")->delimiter(',');
  bench_cmd->add_option("--maps", bench_maps, "maps, comma separated")->delimiter(',');
  bench_cmd->add_option("--m", bench_config.m, "random features");
  bench_cmd->add_option("--sigma2", bench_config.sigma2, "Gaussian weight variance");
  bench_cmd->add_option("--trials", bench_config.trials, "timed batches per (map, k)");
  bench_cmd->add_option("--batch", bench_config.batch, "graphlets per batch");
  bench_cmd->add_option("--warmup", bench_config.warmup, "untimed batches");
  bench_cmd->add_option("--atlas-dir", bench_config.atlas_dir, "atlas cache directory");

  gsa::cli::MmdCheckConfig mmd_config;
  ExperimentFlags mmd_flags;
  auto* mmd_cmd = app.add_subcommand("mmd-check", "concentration of the MMD estimate");
  add_embedding_options(mmd_cmd, mmd_config.experiment, mmd_flags);
  mmd_cmd->get_option("--m")->description("features per trial");
  mmd_cmd->get_option("--s")->description("samples per trial");
  mmd_cmd->add_option("--pair", mmd_config.pair, "cross | same | permuted");
  mmd_cmd->add_option("--delta", mmd_config.delta, "failure probability");
  mmd_cmd->add_option("--bound", mmd_config.feature_bound, "feature bound B (0 = auto)");
  mmd_cmd->add_option("--trials", mmd_config.trials, "independent trials");
  mmd_cmd->add_option("--ref-scale", mmd_config.reference_scale,
                      "reference uses this many times more features and samples");

  try {
    app.parse(argc, argv);
    CLI::App* sub = app.get_subcommands().front();
    if (!config_path.empty()) apply_config_file(app, sub, config_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  auto common = [&](ExperimentConfig& config) {
    config.seed = seed;
    config.out = out;
    config.threads = threads;
  };

  if (atlas_cmd->parsed()) {
    gsa::cli::cmd_atlas(atlas_k, out, std::cout);
  } else if (gen_cmd->parsed()) {
    common(gen_config);
    finish_experiment(gen_config, gen_flags);
    if (gen_config.dataset.kind != DatasetKind::kSbm) {
      throw gsa::InputError("gen-sbm takes SBM options only");
    }
    gsa::cli::cmd_gen_sbm(gen_config, std::cerr);
  } else if (embed_cmd->parsed()) {
    common(embed_config);
    finish_experiment(embed_config, embed_flags);
    gsa::cli::cmd_embed(embed_config, std::cerr);
  } else if (te_cmd->parsed()) {
    common(te_config);
    finish_experiment(te_config, te_flags);
    te_config.classifier.standardize = !no_standardize;
    te_config.r_list = parse_list<double>(r_list);
    if (te_config.r_list.empty() && te_config.dataset.kind == DatasetKind::kSbm &&
        te_cmd->get_option("--r")->count() == 0) {
      te_config.r_list = {1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
    }
    te_config.m_list = parse_list<std::size_t>(m_list);
    const auto result = gsa::cli::cmd_train_eval(te_config, std::cerr);
    for (const auto& s : result.summary) {
      std::cout << "r=" << s.r << " m=" << s.m << " accuracy=" << s.mean << " std=" << s.stddev
                << " reps=" << s.repetitions << '\n';
    }
  } else if (bench_cmd->parsed()) {
    bench_config.seed = seed;
    bench_config.out = out;
    if (!bench_k.empty()) bench_config.k_list = parse_list<int>(bench_k);
    if (!bench_maps.empty()) {
      bench_config.maps.clear();
      for (const auto& name : bench_maps) bench_config.maps.push_back(gsa::parse_map_kind(name));
    }
    const auto result = gsa::cli::cmd_bench(bench_config, std::cerr);
    for (const auto& fit : result.fits) {
      std::cout << gsa::to_string(fit.map) << " exponent=" << fit.exponent
                << " growth=" << fit.growth << '\n';
    }
  } else if (mmd_cmd->parsed()) {
    auto& exp = mmd_config.experiment;
    common(exp);
    finish_experiment(exp, mmd_flags);
    if (mmd_cmd->get_option("--m")->count() > 0) mmd_config.m = exp.map.m;
    if (mmd_cmd->get_option("--s")->count() > 0) mmd_config.s = exp.s;
    const auto report = gsa::cli::cmd_mmd_check(mmd_config, std::cerr);
    std::cout << "violation_rate=" << report.violation_rate << " bound=" << report.bound
              << " median_deviation=" << report.median_deviation() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const gsa::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const gsa::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
