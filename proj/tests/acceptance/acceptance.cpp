// End-to-end acceptance checks. Usage: acceptance <criterion 1-9> [scratch dir]
// Prints one "criterion N: PASS|FAIL ..." line and exits nonzero on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gsa/atlas.hpp"
#include "gsa/commands.hpp"
#include "gsa/data_io.hpp"
#include "gsa/embedding.hpp"
#include "gsa/feature_maps.hpp"
#include "gsa/graph.hpp"
#include "gsa/rng.hpp"
#include "oracles.hpp"

using namespace gsa;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

fs::path g_scratch;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path scratch(const std::string& name) {
  const auto dir = g_scratch / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_sd(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (v.size() - 1));
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * v.size()));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

double norm2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Shared setup -------------------------------------------------------------

// The fixed SBM pair for the concentration runs: the first graph of each class.
std::pair<Graph, Graph> sbm_pair() {
  SbmSpec spec;
  spec.n_graphs = 2;
  spec.seed = 0;
  const auto data = generate_sbm(spec);
  return {data.graphs[0], data.graphs[1]};
}

constexpr int kConcentrationK = 5;

ConcentrationConfig concentration_config(MapKind kind, std::size_t m, std::size_t s) {
  ConcentrationConfig config;
  config.sampler = {SamplerKind::kUniform, kConcentrationK, 0};
  config.map.kind = kind;
  config.map.k = kConcentrationK;
  config.m = m;
  config.s = s;
  config.delta = 0.1;
  config.trials = 200;
  config.seed = 0;
  config.reference_scale = 16;
  config.feature_bound = kind == MapKind::kOpuSim ? 1.0 : std::sqrt(2.0);
  config.threads = 4;
  return config;
}

// The classification operating point shared by criteria 6 and 7.
cli::ExperimentConfig operating_point(MapKind kind, const fs::path& out) {
  cli::ExperimentConfig config;
  config.dataset.sbm.n_graphs = 300;
  config.dataset.sbm.v = 60;
  config.dataset.sbm.expected_degree = 10.0;
  config.sampler = {SamplerKind::kUniform, 5, 0};
  config.map.kind = kind;
  config.map.k = 5;
  config.map.m = 2000;
  config.s = 500;
  config.out = out;
  config.threads = 4;
  return config;
}

constexpr std::size_t kSeeds = 5;

// Criteria -------------------------------------------------------------------

void criterion1(Verdict& v) {
  const std::size_t expected[] = {4, 11, 34, 156, 1044};
  const auto start = Clock::now();
  for (int k = 3; k <= 7; ++k) {
    const auto dir = scratch("c1_k" + std::to_string(k));
    std::ostringstream log;
    const Atlas atlas = cli::cmd_atlas(k, dir, log);
    const std::string want = "N_" + std::to_string(k) + " = " + std::to_string(expected[k - 3]);
    v.require(log.str().find(want) != std::string::npos, "atlas prints " + want);
    v.require(atlas.size() == expected[k - 3], "size at k=" + std::to_string(k));
    v.detail << " N_" << k << "=" << atlas.size();
  }
  const double elapsed = seconds_since(start);
  for (int k = 2; k <= 5; ++k) {
    v.require(build_atlas(k).canonical_codes() == oracle::brute_atlas(k),
              "brute-force agreement at k=" + std::to_string(k));
  }
  v.detail << "; brute force agrees for k<=5; build time " << elapsed << " s (limit 30)";
  v.require(elapsed < 30.0, "runtime");
}

void criterion2(Verdict& v) {
  const auto start = Clock::now();
  RngStream graph_rng(2024, stream_id(StreamTag::kDataset, 0));
  const Graph g = erdos_renyi(20, 0.3, graph_rng);
  const int k = 4;
  FeatureMapSpec spec;
  spec.kind = MapKind::kMatch;
  spec.k = k;
  const auto atlas = std::make_shared<const Atlas>(build_atlas(k));
  const RealizedMap map = realize(spec, atlas);
  const auto exact = exact_spectrum(g, *atlas).values;
  const SamplerSpec sampler{SamplerKind::kUniform, k, 0};
  const std::size_t runs = 50;
  double rms[2];
  const std::size_t sizes[2] = {100, 400};
  for (int which = 0; which < 2; ++which) {
    double sq = 0.0;
    for (std::size_t run = 0; run < runs; ++run) {
      RngStream rng(which, stream_id(StreamTag::kSampling, run));
      const double e = norm2(gsa_embed(g, sampler, map, sizes[which], rng).values, exact);
      sq += e * e;
    }
    rms[which] = std::sqrt(sq / runs);
  }
  const double ratio = rms[1] / rms[0];
  const double elapsed = seconds_since(start);
  v.detail << " RMS(s=100)=" << rms[0] << " RMS(s=400)=" << rms[1] << " ratio=" << ratio
           << " (allowed [0.35, 0.65]); " << elapsed << " s (limit 60)";
  v.require(ratio >= 0.35 && ratio <= 0.65, "ratio");
  v.require(elapsed < 60.0, "runtime");
}

void criterion3(Verdict& v) {
  const auto start = Clock::now();
  const auto [g1, g2] = sbm_pair();
  const auto atlas = std::make_shared<const Atlas>(build_atlas(kConcentrationK));
  const auto big = run_concentration_trials(g1, g2, concentration_config(MapKind::kGaussian, 4096, 4096), atlas);
  const auto small = run_concentration_trials(g1, g2, concentration_config(MapKind::kGaussian, 1024, 1024), atlas);
  const int n = static_cast<int>(big.trials);
  const int violations = static_cast<int>(std::lround(big.violation_rate * n));
  const int allowed = oracle::binomial_upper_quantile(n, 0.10, 0.99);
  const double elapsed = seconds_since(start);
  v.detail << " bound=" << big.bound << " violations=" << violations << "/" << n
           << " (allowed " << allowed << ") median deviation m=s=1024: "
           << small.median_deviation() << " m=s=4096: " << big.median_deviation()
           << " reference MMD^2=" << big.reference_mmd_sq << "; " << elapsed << " s (limit 600)";
  v.require(violations <= allowed, "violation count");
  v.require(big.median_deviation() < small.median_deviation(), "median deviation decreases");
  v.require(elapsed < 600.0, "runtime");
}

void criterion4(Verdict& v) {
  const auto start = Clock::now();
  // Gaussian map on R^9 (k=3 adjacency length), evaluated on arbitrary vectors.
  FeatureMapSpec gspec;
  gspec.kind = MapKind::kGaussian;
  gspec.k = 3;
  gspec.m = 10000;
  gspec.sigma2 = 0.01;
  gspec.seed = 4;
  const RealizedMap gmap = realize(gspec);
  const double tolerance = 3.0 / std::sqrt(static_cast<double>(gspec.m));
  RngStream rng(4, stream_id(StreamTag::kTrial, 0));
  double worst = 0.0;
  for (int pair = 0; pair < 100; ++pair) {
    std::vector<double> x(9), y(9);
    for (double& a : x) a = -5.0 + 10.0 * rng.uniform();
    for (double& a : y) a = -5.0 + 10.0 * rng.uniform();
    const auto fx = phi_gaussian(gmap, x);
    const auto fy = phi_gaussian(gmap, y);
    const double dot = std::inner_product(fx.begin(), fx.end(), fy.begin(), 0.0);
    worst = std::max(worst, std::abs(dot - gaussian_kernel(x, y, gspec.sigma2)));
  }
  v.detail << " gaussian worst |error|=" << worst << " (tolerance " << tolerance << ")";
  v.require(worst <= tolerance, "gaussian kernel");

  FeatureMapSpec ospec;
  ospec.kind = MapKind::kOpuSim;
  ospec.k = 4;
  ospec.m = 100000;
  ospec.seed = 4;
  const RealizedMap omap = realize(ospec);
  double worst_rel = 0.0;
  for (int pair = 0; pair < 10; ++pair) {
    const std::uint64_t all = (std::uint64_t{1} << pair_count(4)) - 1;
    GraphletCode a(4, 0), b(4, 0);
    while (a.bits == 0) a = GraphletCode(4, rng.next_u64() & all);
    while (b.bits == 0) b = GraphletCode(4, rng.next_u64() & all);
    const auto fa = phi_opu_sim(omap, a);
    const auto fb = phi_opu_sim(omap, b);
    const double dot = std::inner_product(fa.begin(), fa.end(), fb.begin(), 0.0);
    const double expected = opu_kernel_closed_form(flatten_adjacency(a), flatten_adjacency(b));
    worst_rel = std::max(worst_rel, std::abs(dot / expected - 1.0));
  }
  const double elapsed = seconds_since(start);
  v.detail << "; opu worst relative error=" << worst_rel << " over 10 graphlet pairs (tolerance 0.05); "
           << elapsed << " s (limit 60)";
  v.require(worst_rel <= 0.05, "opu kernel");
  v.require(elapsed < 60.0, "runtime");
}

void criterion5(Verdict& v) {
  // Exact spectra of permuted copies: identical histograms, so exactly zero.
  const Atlas atlas4 = build_atlas(4);
  RngStream rng(5, stream_id(StreamTag::kPermutation, 0));
  int exact_nonzero = 0;
  for (int i = 0; i < 20; ++i) {
    RngStream grng(5, stream_id(StreamTag::kDataset, i));
    const Graph g = erdos_renyi(24, 0.3, grng);
    const Graph h = permute_graph(g, oracle::random_node_perm(24, rng));
    exact_nonzero += mmd_sq_estimate(exact_spectrum(g, atlas4), exact_spectrum(h, atlas4)) != 0.0;
  }
  v.detail << " exact nonzero=" << exact_nonzero << "/20";
  v.require(exact_nonzero == 0, "exact spectra");

  // Null distribution: the criterion-3 graph against itself under OpuSim.
  const auto atlas = std::make_shared<const Atlas>(build_atlas(kConcentrationK));
  const auto [g1, unused] = sbm_pair();
  (void)unused;
  auto null_config = concentration_config(MapKind::kOpuSim, 4096, 4096);
  null_config.reference_scale = 1;
  const auto null = run_concentration_trials(g1, g1, null_config, atlas);
  const double threshold = percentile(null.distances, 0.95);

  // Permuted SBM graphs of the same family, fresh map and samples per pair.
  SbmSpec spec;
  spec.n_graphs = 20;
  spec.seed = 55;
  const auto data = generate_sbm(spec);
  const SamplerSpec sampler{SamplerKind::kUniform, kConcentrationK, 0};
  int exceed = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Graph& g = data.graphs[i];
    const Graph h = permute_graph(g, oracle::random_node_perm(g.node_count(), rng));
    FeatureMapSpec mspec;
    mspec.kind = MapKind::kOpuSim;
    mspec.k = kConcentrationK;
    mspec.m = 4096;
    mspec.seed = 500 + i;
    const RealizedMap map = realize(mspec);
    RngStream ra(5, stream_id(StreamTag::kSampling, 2 * i));
    RngStream rb(5, stream_id(StreamTag::kSampling, 2 * i + 1));
    const double d = mmd_sq_estimate(gsa_embed(g, sampler, map, 4096, ra),
                                     gsa_embed(h, sampler, map, 4096, rb));
    exceed += d >= threshold;
  }
  const int allowed = oracle::binomial_upper_quantile(20, 0.05, 0.99);
  v.detail << "; opu null 95th percentile=" << threshold << " permuted pairs at or above it="
           << exceed << "/20 (allowed " << allowed << ")";
  v.require(exceed <= allowed, "sampled opu");
}

struct Accuracies {
  std::vector<double> per_seed;
  double mean() const { return mean_of(per_seed); }
};

Accuracies accuracies(MapKind kind, double r, const std::string& name) {
  const auto config = operating_point(kind, scratch(name));
  const auto atlas = std::make_shared<const Atlas>(build_atlas(5));
  Accuracies out;
  for (std::size_t rep = 0; rep < kSeeds; ++rep) {
    out.per_seed.push_back(cli::run_repetition(config, r, config.map.m, rep, atlas).accuracy);
  }
  return out;
}

void criterion6(Verdict& v) {
  const auto start = Clock::now();
  const double rs[] = {1.0, 1.2, 1.5};
  std::vector<Accuracies> acc;
  for (double r : rs) {
    acc.push_back(accuracies(MapKind::kOpuSim, r, "c6"));
    v.detail << " r=" << r << ": mean " << acc.back().mean() << " [";
    for (double a : acc.back().per_seed) v.detail << " " << a;
    v.detail << " ]";
  }
  // Larger r separates the classes more, so accuracy should not drop as r grows.
  int inversions = 0;
  for (std::size_t seed = 0; seed < kSeeds; ++seed) {
    for (std::size_t i = 1; i < acc.size(); ++i) {
      inversions += acc[i].per_seed[seed] < acc[i - 1].per_seed[seed];
    }
  }
  const double elapsed = seconds_since(start);
  v.detail << "; inversions=" << inversions << " (allowed 1); " << elapsed << " s (limit 900)";
  v.require(acc[2].mean() >= 0.9, "accuracy at r=1.5 >= 0.9");
  v.require(acc[0].mean() >= 0.35 && acc[0].mean() <= 0.65, "accuracy at r=1.0 in [0.35, 0.65]");
  v.require(inversions <= 1, "monotone in r");
  v.require(elapsed < 900.0, "runtime");
}

void criterion7(Verdict& v) {
  const double r = 1.5;
  const auto gauss = accuracies(MapKind::kGaussian, r, "c7");
  const auto eig = accuracies(MapKind::kGaussianEig, r, "c7");
  const auto opu = accuracies(MapKind::kOpuSim, r, "c7");
  const double se = sample_sd(opu.per_seed) / std::sqrt(static_cast<double>(kSeeds));
  v.detail << " gaussian " << gauss.mean() << ", gaussian-eig " << eig.mean() << ", opu "
           << opu.mean() << " (se " << se << ", needs >= " << 0.5 + 3 * se << ")";
  v.require(eig.mean() >= gauss.mean() - 0.05, "gaussian-eig >= gaussian - 0.05");
  v.require(opu.mean() >= 0.5 + 3 * se, "opu above chance");
}

void criterion8(Verdict& v) {
  const auto start = Clock::now();
  cli::BenchConfig config;
  config.k_list = {4, 5, 6, 7};
  config.maps = {MapKind::kMatch, MapKind::kGaussian, MapKind::kGaussianEig, MapKind::kOpuSim};
  config.out = scratch("c8");
  std::ostringstream log;
  const auto result = cli::cmd_bench(config, log);
  std::map<MapKind, cli::BenchFit> fits;
  for (const auto& fit : result.fits) fits[fit.map] = fit;
  for (const auto& [kind, fit] : fits) {
    v.detail << " " << to_string(kind) << ": exponent " << fit.exponent << " growth " << fit.growth
             << ";";
  }
  std::ifstream in(config.out / "bench_fit.txt");
  std::stringstream text;
  text << in.rdbuf();
  const bool marked = text.str().find("opu_hardware_constant_time=not_reproduced") != std::string::npos;
  const double trend = fits[MapKind::kOpuSim].growth / fits[MapKind::kGaussian].growth;
  const double elapsed = seconds_since(start);
  v.detail << " opu/gaussian growth ratio " << trend << " (allowed [0.5, 2]); hardware claim marked "
           << (marked ? "not reproduced" : "MISSING") << "; " << elapsed << " s (limit 300)";
  v.require(fits[MapKind::kMatch].exponent > 3.0, "match exponent > 3");
  v.require(fits[MapKind::kGaussian].exponent <= 2.5, "gaussian exponent <= 2.5");
  v.require(trend >= 0.5 && trend <= 2.0, "opu trend within 2x of gaussian");
  v.require(marked, "hardware note");
  v.require(elapsed < 300.0, "runtime");
}

using Snapshot = std::map<std::string, std::string>;

// Every regular file under `dir` except wall-clock outputs.
Snapshot snapshot(const fs::path& dir) {
  Snapshot out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name == "report_timing.csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream bytes;
    bytes << in.rdbuf();
    out[fs::relative(entry.path(), dir).string()] = bytes.str();
  }
  return out;
}

void criterion9(Verdict& v) {
  auto run_all = [](const fs::path& root, unsigned threads) {
    fs::remove_all(root);
    std::ostringstream log;
    cli::cmd_atlas(5, root / "atlas", log);

    cli::ExperimentConfig base;
    base.dataset.sbm.n_graphs = 40;
    base.seed = 9;
    base.threads = threads;
    base.sampler = {SamplerKind::kUniform, 5, 0};
    base.map.kind = MapKind::kOpuSim;
    base.map.k = 5;
    base.map.m = 256;
    base.s = 200;

    auto gen = base;
    gen.out = root / "gen";
    cli::cmd_gen_sbm(gen, log);

    auto embed = base;
    embed.out = root / "embed_opu";
    cli::cmd_embed(embed, log);

    auto match = base;
    match.map.kind = MapKind::kMatch;
    match.map.m = 0;
    match.sampler.kind = SamplerKind::kRandomWalk;
    match.out = root / "embed_match";
    cli::cmd_embed(match, log);

    auto train = base;
    train.out = root / "train";
    train.r_list = {1.0, 1.5};
    train.repetitions = 2;
    cli::cmd_train_eval(train, log);

    cli::MmdCheckConfig mmd;
    mmd.experiment = base;
    mmd.experiment.map.kind = MapKind::kGaussian;
    mmd.experiment.out = root / "mmd";
    mmd.m = 256;
    mmd.s = 256;
    mmd.trials = 10;
    mmd.reference_scale = 4;
    cli::cmd_mmd_check(mmd, log);
    return snapshot(root);
  };
  const auto first = run_all(g_scratch / "c9_a", 4);
  const auto second = run_all(g_scratch / "c9_a", 4);
  const auto single = run_all(g_scratch / "c9_a", 1);
  int differing = 0;
  for (const auto& [name, bytes] : first) {
    const auto other = second.find(name);
    if (other == second.end() || other->second != bytes) {
      ++differing;
      v.detail << " rerun differs: " << name;
    }
    const auto one = single.find(name);
    if (one == single.end() || one->second != bytes) {
      ++differing;
      v.detail << " thread count changes: " << name;
    }
  }
  v.detail << " " << first.size() << " output files compared across reruns and thread counts"
           << " (timing files excluded), " << differing << " differ";
  v.require(!first.empty() && first.size() == second.size() && differing == 0, "byte identity");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <criterion 1-9> [scratch dir]\n";
    return 2;
  }
  const int criterion = std::atoi(argv[1]);
  g_scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "gsa_acceptance";
  g_scratch /= "c" + std::to_string(criterion);
  fs::create_directories(g_scratch);

  Verdict v;
  try {
    switch (criterion) {
      case 1: criterion1(v); break;
      case 2: criterion2(v); break;
      case 3: criterion3(v); break;
      case 4: criterion4(v); break;
      case 5: criterion5(v); break;
      case 6: criterion6(v); break;
      case 7: criterion7(v); break;
      case 8: criterion8(v); break;
      case 9: criterion9(v); break;
      default:
        std::cerr << "unknown criterion " << criterion << "\n";
        return 2;
    }
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " exception: " << e.what();
  }
  std::cout << "criterion " << criterion << ": " << (v.pass ? "PASS" : "FAIL") << " -"
            << v.detail.str() << std::endl;
  return v.pass ? 0 : 1;
}
