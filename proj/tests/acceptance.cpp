// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Criteria 1-8 and 10 run against the library; criterion 9 drives the actual
// CLI binary (path in $TWA_CLI) and falls back to in-process timing when the
// binary is not available.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "support/gen_points.hpp"
#include "twa/frt.hpp"
#include "twa/gen.hpp"
#include "twa/io_json.hpp"
#include "twa/kr_dual.hpp"
#include "twa/metric.hpp"
#include "twa/rng.hpp"
#include "twa/stochastic.hpp"
#include "twa/transport.hpp"
#include "twa/tree_ot.hpp"

using namespace twa;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%2d] %-34s %s  %s\n", id, name, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class R>
struct Instance {
  MetricTree<R> tree;
  Measure<R> mu, nu;
};

template <class R>
std::vector<Instance<R>> make_corpus(uint64_t seed, size_t count, uint32_t max_vertices, uint32_t max_support) {
  Rng rng(seed);
  std::vector<Instance<R>> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(max_vertices - 1));
    auto tree = random_tree<R>(rng, n);
    auto [mu, nu] = random_measure_pair<R>(rng, n, max_support);
    out.push_back({std::move(tree), std::move(mu), std::move(nu)});
  }
  return out;
}

template <class R>
std::vector<TreeEdge<R>> edges_of(const MetricTree<R>& t) {
  std::vector<TreeEdge<R>> edges;
  for (uint32_t v = 0; v < t.size(); ++v) {
    if (v != t.root()) edges.push_back({t.parent(v), v, t.edge_weight(v)});
  }
  return edges;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------- 1/2/3

void criteria_123(const std::vector<Instance<Rational>>& exact_corpus,
                  const std::vector<Instance<double>>& float_corpus) {
  auto t0 = std::chrono::steady_clock::now();
  bool c1 = true, c2 = true, c3 = true;
  double worst_rel = 0;

  for (const auto& inst : exact_corpus) {
    Rational w = tree_wasserstein(inst.tree, inst.mu, inst.nu);
    Rational lp = transport_lp(pairwise_distances(inst.tree), inst.mu, inst.nu).value;
    c1 = c1 && w == lp;
    auto coupling = optimal_coupling(inst.tree, inst.mu, inst.nu);
    c2 = c2 && coupling.max_marginal_deviation() == Rational(0) && coupling_cost(inst.tree, coupling) == w;
    c3 = c3 && l1_distance(embed_measure(inst.tree, inst.mu), embed_measure(inst.tree, inst.nu)) == w;
  }
  for (const auto& inst : float_corpus) {
    double w = tree_wasserstein(inst.tree, inst.mu, inst.nu);
    double lp = transport_lp(pairwise_distances(inst.tree), inst.mu, inst.nu).value;
    double scale = std::max(1.0, std::abs(w));
    worst_rel = std::max(worst_rel, std::abs(w - lp) / scale);
    c1 = c1 && std::abs(w - lp) <= 1e-8 * scale;
    auto coupling = optimal_coupling(inst.tree, inst.mu, inst.nu);
    c2 = c2 && coupling.max_marginal_deviation() <= 1e-10 &&
         std::abs(coupling_cost(inst.tree, coupling) - w) <= 1e-9 * scale;
  }
  double elapsed = seconds_since(t0);
  c1 = c1 && elapsed < 60.0;

  std::ostringstream d1;
  d1 << exact_corpus.size() << " exact + " << float_corpus.size() << " float instances, worst float rel dev "
     << fmt(worst_rel) << ", " << fmt(elapsed) << " s";
  report(1, "formula equals transport LP", c1, d1.str());
  report(2, "coupling marginals and cost", c2, "same corpus; exact marginals, cost == formula");
  report(3, "edge embedding is isometric", c3, "exact l1 == formula on every exact instance");
}

// ------------------------------------------------------------------------- 4

void criterion_4(const std::vector<Instance<Rational>>& corpus) {
  bool ok = true;
  size_t rebuilds = 0;
  for (const auto& inst : corpus) {
    Rational w = tree_wasserstein(inst.tree, inst.mu, inst.nu);
    auto edges = edges_of(inst.tree);
    for (uint32_t root = 0; root < inst.tree.size(); ++root) {
      auto rerooted = MetricTree<Rational>::build(inst.tree.size(), edges, root);
      ok = ok && tree_wasserstein(rerooted, inst.mu, inst.nu) == w;
      ++rebuilds;
    }
  }
  report(4, "root invariance", ok, std::to_string(rebuilds) + " rebuilds, all values identical (exact)");
}

// ------------------------------------------------------------------------- 5

void criterion_5() {
  bool ok = true;
  double worst_rel = 0;
  {
    Rng rng(505);
    for (int it = 0; it < 100; ++it) {
      uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(14));
      auto tree = random_tree<Rational>(rng, n);
      auto metric = pairwise_distances(tree);
      auto [mu, nu] = random_measure_pair<Rational>(rng, n, 8);
      ok = ok && kr_dual_value(metric, mu, nu) == transport_lp(metric, mu, nu).value;
    }
  }
  {
    Rng rng(506);
    for (int it = 0; it < 100; ++it) {
      uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(14));
      auto tree = random_tree<double>(rng, n);
      auto metric = pairwise_distances(tree);
      auto [mu, nu] = random_measure_pair<double>(rng, n, 8);
      double lp = transport_lp(metric, mu, nu).value;
      double kr = kr_dual_value(metric, mu, nu);
      double rel = std::abs(lp - kr) / std::max(1.0, lp);
      worst_rel = std::max(worst_rel, rel);
      ok = ok && rel <= 1e-6;
    }
  }
  report(5, "Kantorovich-Rubinstein duality", ok,
         "100 exact (equal) + 100 float instances, worst rel dev " + fmt(worst_rel));
}

// ----------------------------------------------------------------------- 6/7

void criteria_67() {
  Rng rng(607);
  bool lower_ok = true, avg_ok = true, sandwich_ok = true;
  size_t pairs_checked = 0;
  for (int emb = 0; emb < 50; ++emb) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(15));
    uint32_t count = 1 + static_cast<uint32_t>(rng.next_below(20));
    auto metric = twatest::random_point_metric(rng, n);
    auto embedding = frt_sample(metric, rng.next_u64(), count);
    double d_emp = to_double(validate_embedding(embedding).max_ratio);

    for (int k = 0; k < 20; ++k) {
      auto [mu, nu] = random_measure_pair<double>(rng, n, 8);
      double base = transport_lp(metric, mu, nu).value;
      double weighted = 0;
      for (const auto& comp : embedding.components()) {
        double wi = tree_wasserstein(comp.tree, pushforward<double>(comp.f, mu), pushforward<double>(comp.f, nu));
        lower_ok = lower_ok && wi >= base - 1e-9;
        weighted += comp.p * wi;
      }
      double image = l1_distance(wasserstein_l1_map(embedding, mu), wasserstein_l1_map(embedding, nu));
      if (base < 1e-12) {
        avg_ok = avg_ok && weighted < 1e-9;
        sandwich_ok = sandwich_ok && image < 1e-9;
      } else {
        avg_ok = avg_ok && weighted <= d_emp * base * (1 + 1e-9);
        sandwich_ok = sandwich_ok && image >= base * (1 - 1e-9) && image <= d_emp * base * (1 + 1e-9);
      }
      ++pairs_checked;
    }
  }
  report(6, "stochastic lift bounds", lower_ok && avg_ok,
         "50 embeddings x 20 pairs: per-component lower bound and weighted average");
  report(7, "Wasserstein distortion sandwich", sandwich_ok,
         std::to_string(pairs_checked) + " pairs inside [Wa, D_emp * Wa]");
}

// ------------------------------------------------------------------------- 8

void criterion_8() {
  Rng rng(808);
  auto metric = twatest::random_point_metric(rng, 64);
  auto embedding = frt_sample(metric, 6464, 100);

  bool noncontracting = true;
  double ratio_sum = 0;
  size_t pairs = 0;
  for (uint32_t x = 0; x < 64; ++x) {
    for (uint32_t y = x + 1; y < 64; ++y) {
      double d = metric.at(x, y);
      double stretched = 0;
      for (const auto& comp : embedding.components()) {
        double dt = comp.tree.path_distance(comp.f[x], comp.f[y]);
        noncontracting = noncontracting && dt >= d;  // strict, no slack
        stretched += comp.p * dt;
      }
      ratio_sum += stretched / d;
      ++pairs;
    }
  }
  double mean = ratio_sum / static_cast<double>(pairs);
  double ceiling = 8.0 * std::log(64.0);
  bool ok = noncontracting && mean <= ceiling;
  report(8, "FRT sampler sanity", ok,
         "100 trees on 64 points: mean distortion " + fmt(mean) + " (ceiling " + fmt(ceiling) + ")");
}

// ------------------------------------------------------------------------- 9

std::optional<double> bench_via_cli(const std::string& cli, uint32_t vertices) {
  std::string cmd = "\"" + cli + "\" bench --vertices " + std::to_string(vertices) + " --seed 7 --reps 5";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return std::nullopt;
  std::string output;
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) output += buf;
  if (pclose(pipe) != 0) return std::nullopt;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("tree_wasserstein,", 0) == 0) {
      return std::stod(line.substr(line.rfind(',') + 1));
    }
  }
  return std::nullopt;
}

double bench_in_process(uint32_t vertices) {
  Rng rng(7);
  auto tree = random_tree<double>(rng, vertices);
  Rng mrng(8);
  auto [mu, nu] = random_measure_pair<double>(mrng, vertices, 256);
  double best = 0;
  for (int rep = 0; rep < 5; ++rep) {
    auto t0 = std::chrono::steady_clock::now();
    volatile double w = tree_wasserstein(tree, mu, nu);
    (void)w;
    double ms = seconds_since(t0) * 1e3;
    if (rep == 0 || ms < best) best = ms;
  }
  return best;
}

void criterion_9() {
  const char* cli = std::getenv("TWA_CLI");
  const uint32_t sizes[3] = {250000, 500000, 1000000};
  double ms[3] = {0, 0, 0};
  bool via_cli = cli && *cli;
  // minimum over two invocations per size shields the ratio test from
  // transient machine load
  for (int i = 0; i < 3; ++i) {
    std::optional<double> t;
    if (via_cli) {
      t = bench_via_cli(cli, sizes[i]);
      if (t) {
        auto again = bench_via_cli(cli, sizes[i]);
        if (again && *again < *t) t = again;
      }
    }
    if (!t) {
      via_cli = false;
      t = std::min(bench_in_process(sizes[i]), bench_in_process(sizes[i]));
    }
    ms[i] = *t;
  }
  bool ok = ms[2] <= 5000.0 && ms[1] <= 2.5 * ms[0] && ms[2] <= 2.5 * ms[1];
  std::ostringstream d;
  d << (via_cli ? "cmd_bench" : "in-process") << ": " << fmt(ms[0]) << " / " << fmt(ms[1]) << " / " << fmt(ms[2])
    << " ms at 250k/500k/1M vertices";
  report(9, "linear-time scaling", ok, d.str());
}

// ------------------------------------------------------------------------ 10

void criterion_10() {
  bool ok = true;

  // sampling is a pure function of (metric, seed, count)
  Rng rng(1010);
  auto tree = random_tree<Rational>(rng, 12);
  auto metric = pairwise_distances(tree);
  auto labels = io::default_labels(metric.size());
  auto a = io::embedding_to_json(io::label_embedding(frt_sample(metric, 99, 7), labels));
  auto b = io::embedding_to_json(io::label_embedding(frt_sample(metric, 99, 7), labels));
  ok = ok && a == b;

  // random instances and couplings reproduce bit-exactly from the seed
  auto make_coupling_json = [] {
    Rng r(2020);
    auto t = random_tree<Rational>(r, 30);
    auto [mu, nu] = random_measure_pair<Rational>(r, 30, 8);
    auto c = optimal_coupling(t, mu, nu);
    return io::coupling_to_json(io::default_labels(30), c, coupling_cost(t, c));
  };
  ok = ok && make_coupling_json() == make_coupling_json();

  report(10, "seeded determinism", ok, "embedding and coupling exports are bit-identical across reruns");
}

}  // namespace

int main() {
  auto exact_corpus = make_corpus<Rational>(11, 500, 40, 8);
  auto float_corpus = make_corpus<double>(12, 500, 40, 8);

  criteria_123(exact_corpus, float_corpus);
  criterion_4(exact_corpus);
  criterion_5();
  criteria_67();
  criterion_8();
  criterion_9();
  criterion_10();

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
