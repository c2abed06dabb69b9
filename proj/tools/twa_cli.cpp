// twa — command-line front end of the treewass shared library.
//
// Every command prints a machine-readable run report (JSON) to stdout and
// writes artifact files through --out; bench emits CSV timing rows instead
// unless --json is given. Exit code 0 means all validations passed.

#include <treewass/treewass.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

[[noreturn]] void die(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(1);
}

void check(twa_status s, const std::string& what) {
  if (s != TWA_OK) die(what + ": " + twa_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) die("cannot write " + path);
  out << text;
}

std::string fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (p) Free(p);
  }
  T** out() { return &p; }
  operator T*() const { return p; }
  operator const T*() const { return p; }
};

using TreeH = Handle<twa_tree, twa_tree_free>;
using MeasureH = Handle<twa_measure, twa_measure_free>;
using MetricH = Handle<twa_metric, twa_metric_free>;
using CouplingH = Handle<twa_coupling, twa_coupling_free>;
using VectorH = Handle<twa_vector, twa_vector_free>;
using EmbeddingH = Handle<twa_embedding, twa_embedding_free>;

struct OwnedStr {
  char* p = nullptr;
  ~OwnedStr() { twa_str_free(p); }
  char** out() { return &p; }
  bool has() const { return p != nullptr; }
  std::string str() const { return p ? p : ""; }
};

struct Report {
  json doc;
  Report(const std::string& command, bool exact) {
    doc["command"] = command;
    doc["version"] = twa_version();
    doc["mode"] = exact ? "rational" : "float";
    doc["inputs"] = json::object();
    doc["outputs"] = json::object();
    doc["timings_ms"] = json::object();
  }
  void input(const std::string& name, const std::string& path, const std::string& bytes) {
    doc["inputs"][name] = {{"path", path}, {"fnv1a64", fnv1a64(bytes)}};
  }
  void timing(const std::string& stage, double ms) { doc["timings_ms"][stage] = ms; }
  void print() const { std::cout << doc.dump(2) << "\n"; }
};

void put_value(json& outputs, const std::string& name, double v, const OwnedStr& exact) {
  outputs[name] = v;
  if (exact.has()) outputs[name + "_exact"] = exact.str();
}

constexpr double k_oracle_rel_tol = 1e-8;
constexpr double k_marginal_tol = 1e-10;

// ---------------------------------------------------------------------------

int cmd_dist(const std::string& tree_path, const std::string& mu_path, const std::string& nu_path, bool exact,
             bool check_oracle) {
  twa_numeric mode = exact ? TWA_NUM_RATIONAL : TWA_NUM_DOUBLE;
  Report report("dist", exact);

  Timer parse;
  std::string tree_text = read_file(tree_path), mu_text = read_file(mu_path), nu_text = read_file(nu_path);
  report.input("tree", tree_path, tree_text);
  report.input("mu", mu_path, mu_text);
  report.input("nu", nu_path, nu_text);
  TreeH tree;
  MeasureH mu, nu;
  check(twa_tree_from_json(tree_text.c_str(), mode, tree.out()), tree_path);
  check(twa_measure_on_tree_from_json(tree, mu_text.c_str(), mu.out()), mu_path);
  check(twa_measure_on_tree_from_json(tree, nu_text.c_str(), nu.out()), nu_path);
  report.timing("parse", parse.ms());

  Timer compute;
  double value = 0;
  OwnedStr value_exact;
  check(twa_tree_wasserstein(tree, mu, nu, &value, value_exact.out()), "tree_wasserstein");
  report.timing("compute", compute.ms());
  put_value(report.doc["outputs"], "wasserstein", value, value_exact);

  bool ok = true;
  if (check_oracle) {
    Timer oracle;
    MetricH metric;
    check(twa_metric_from_tree(tree, 0, metric.out()), "pairwise distances");
    double lp = 0;
    OwnedStr lp_exact;
    check(twa_transport_lp(metric, mu, nu, &lp, lp_exact.out(), nullptr), "transport oracle");
    report.timing("oracle", oracle.ms());
    put_value(report.doc["outputs"], "oracle_value", lp, lp_exact);
    double delta = std::abs(value - lp);
    report.doc["outputs"]["oracle_delta"] = delta;
    bool match = exact ? value_exact.str() == lp_exact.str() : delta <= k_oracle_rel_tol * std::max(1.0, value);
    report.doc["outputs"]["oracle_match"] = match;
    ok = ok && match;
  }
  report.print();
  return ok ? 0 : 1;
}

int cmd_coupling(const std::string& tree_path, const std::string& mu_path, const std::string& nu_path,
                 const std::string& out_path, bool exact) {
  twa_numeric mode = exact ? TWA_NUM_RATIONAL : TWA_NUM_DOUBLE;
  Report report("coupling", exact);

  Timer parse;
  std::string tree_text = read_file(tree_path), mu_text = read_file(mu_path), nu_text = read_file(nu_path);
  report.input("tree", tree_path, tree_text);
  report.input("mu", mu_path, mu_text);
  report.input("nu", nu_path, nu_text);
  TreeH tree;
  MeasureH mu, nu;
  check(twa_tree_from_json(tree_text.c_str(), mode, tree.out()), tree_path);
  check(twa_measure_on_tree_from_json(tree, mu_text.c_str(), mu.out()), mu_path);
  check(twa_measure_on_tree_from_json(tree, nu_text.c_str(), nu.out()), nu_path);
  report.timing("parse", parse.ms());

  Timer compute;
  CouplingH coupling;
  check(twa_optimal_coupling(tree, mu, nu, coupling.out()), "optimal_coupling");
  report.timing("compute", compute.ms());

  double cost = 0;
  OwnedStr cost_exact;
  check(twa_coupling_cost_tree(tree, coupling, &cost, cost_exact.out()), "coupling cost");
  double deviation = 0;
  check(twa_coupling_marginal_deviation(coupling, &deviation), "marginal audit");
  bool marginals_ok = exact ? deviation == 0 : deviation <= k_marginal_tol;

  put_value(report.doc["outputs"], "cost", cost, cost_exact);
  report.doc["outputs"]["entries"] = twa_coupling_entry_count(coupling);
  report.doc["outputs"]["marginal_deviation"] = deviation;
  report.doc["outputs"]["marginals_ok"] = marginals_ok;

  if (!out_path.empty()) {
    OwnedStr text;
    check(twa_coupling_to_json_tree(tree, coupling, text.out()), "coupling export");
    write_file(out_path, text.str() + "\n");
    report.doc["outputs"]["coupling_file"] = out_path;
  }
  report.print();
  return marginals_ok ? 0 : 1;
}

int cmd_embed(const std::string& tree_path, const std::string& measure_path, const std::string& out_path,
              bool exact) {
  twa_numeric mode = exact ? TWA_NUM_RATIONAL : TWA_NUM_DOUBLE;
  Report report("embed", exact);

  Timer parse;
  std::string tree_text = read_file(tree_path), measure_text = read_file(measure_path);
  report.input("tree", tree_path, tree_text);
  report.input("measure", measure_path, measure_text);
  TreeH tree;
  MeasureH m;
  check(twa_tree_from_json(tree_text.c_str(), mode, tree.out()), tree_path);
  check(twa_measure_on_tree_from_json(tree, measure_text.c_str(), m.out()), measure_path);
  report.timing("parse", parse.ms());

  Timer compute;
  VectorH vec;
  check(twa_embed_measure(tree, m, vec.out()), "embed_measure");
  report.timing("compute", compute.ms());
  report.doc["outputs"]["entries"] = twa_vector_entry_count(vec);

  if (!out_path.empty()) {
    OwnedStr text;
    check(twa_vector_to_json_tree(tree, vec, text.out()), "vector export");
    write_file(out_path, text.str() + "\n");
    report.doc["outputs"]["vector_file"] = out_path;
  }
  report.print();
  return 0;
}

enum class FrtInput { automatic, points, matrix };

int cmd_frt(const std::string& input_path, FrtInput kind, uint64_t seed, uint32_t count,
            const std::string& out_path, bool exact) {
  twa_numeric mode = exact ? TWA_NUM_RATIONAL : TWA_NUM_DOUBLE;
  Report report("frt", exact);
  report.doc["seed"] = seed;

  Timer parse;
  std::string text = read_file(input_path);
  report.input("metric", input_path, text);
  MetricH metric;
  if (kind == FrtInput::points) {
    if (exact) die("point-set input needs float mode (Euclidean distances are irrational)");
    check(twa_metric_from_points_csv(text.c_str(), metric.out()), input_path);
  } else if (kind == FrtInput::matrix) {
    check(twa_metric_from_csv(text.c_str(), mode, metric.out()), input_path);
  } else {
    if (twa_metric_from_csv(text.c_str(), mode, metric.out()) != TWA_OK) {
      std::string matrix_error = twa_last_error();
      if (exact) die(input_path + ": " + matrix_error);
      if (twa_metric_from_points_csv(text.c_str(), metric.out()) != TWA_OK) {
        die(input_path + ": not a distance matrix (" + matrix_error + ") nor a point set (" + twa_last_error() +
            ")");
      }
    }
  }
  report.timing("parse", parse.ms());

  Timer compute;
  EmbeddingH embedding;
  check(twa_frt_sample(metric, seed, count, embedding.out()), "frt_sample");
  report.timing("sample", compute.ms());

  report.doc["outputs"]["source_points"] = twa_metric_point_count(metric);
  report.doc["outputs"]["components"] = twa_embedding_component_count(embedding);
  if (twa_metric_point_count(metric) >= 2) {
    double lo = 0, hi = 0;
    uint32_t a = 0, b = 0;
    check(twa_embedding_validate(embedding, &lo, &hi, &a, &b, nullptr, 0), "distortion audit");
    report.doc["outputs"]["distortion_min_ratio"] = lo;
    report.doc["outputs"]["distortion_max_ratio"] = hi;
  }

  OwnedStr text_out;
  check(twa_embedding_to_json(embedding, text_out.out()), "embedding export");
  if (!out_path.empty()) {
    write_file(out_path, text_out.str() + "\n");
    report.doc["outputs"]["embedding_file"] = out_path;
  } else {
    report.doc["outputs"]["embedding"] = json::parse(text_out.str());
  }
  report.print();
  return 0;
}

int cmd_audit(const std::string& embedding_path, uint32_t pairs, uint64_t seed, bool exact) {
  twa_numeric mode = exact ? TWA_NUM_RATIONAL : TWA_NUM_DOUBLE;
  Report report("audit", exact);
  report.doc["seed"] = seed;

  Timer parse;
  std::string text = read_file(embedding_path);
  report.input("embedding", embedding_path, text);
  EmbeddingH embedding;
  check(twa_embedding_from_json(text.c_str(), mode, embedding.out()), embedding_path);
  report.timing("parse", parse.ms());

  Timer compute;
  twa_audit_result result{};
  check(twa_wasserstein_audit(embedding, pairs, seed, &result), "wasserstein audit");
  report.timing("audit", compute.ms());

  json& out = report.doc["outputs"];
  out["components"] = twa_embedding_component_count(embedding);
  out["point_min_ratio"] = result.point_min_ratio;
  out["point_max_ratio"] = result.point_max_ratio;
  out["empirical_distortion"] = result.point_max_ratio;
  out["worst_point_pair"] = {result.point_argmax_a, result.point_argmax_b};
  out["pair_min_ratio"] = result.pair_min_ratio;
  out["pair_max_ratio"] = result.pair_max_ratio;
  out["pairs_evaluated"] = result.pairs_evaluated;
  out["pairs_skipped"] = result.pairs_skipped;
  out["verdict"] = result.sandwich_ok ? "PASS" : "FAIL";
  report.print();
  return result.sandwich_ok ? 0 : 1;
}

int cmd_bench(uint32_t vertices, uint64_t seed, uint32_t support, uint32_t reps, bool as_json,
              const std::string& out_path, bool exact) {
  twa_numeric mode = exact ? TWA_NUM_RATIONAL : TWA_NUM_DOUBLE;
  Report report("bench", exact);
  report.doc["seed"] = seed;
  if (reps == 0) reps = 1;

  TreeH tree;
  check(twa_random_tree(vertices, seed, mode, tree.out()), "random tree");
  MeasureH mu, nu;
  check(twa_random_measure_pair_on_tree(tree, seed + 1, support, mu.out(), nu.out()), "random measures");

  double wall_dist = 0, wall_coupling = 0;
  double value = 0;
  OwnedStr value_exact;
  for (uint32_t r = 0; r < reps; ++r) {
    Timer t;
    OwnedStr ex;
    check(twa_tree_wasserstein(tree, mu, nu, &value, ex.out()), "tree_wasserstein");
    double ms = t.ms();
    if (r == 0 || ms < wall_dist) wall_dist = ms;
    if (r == 0) value_exact.p = std::exchange(ex.p, nullptr);
  }
  size_t coupling_entries = 0;
  for (uint32_t r = 0; r < reps; ++r) {
    Timer t;
    CouplingH coupling;
    check(twa_optimal_coupling(tree, mu, nu, coupling.out()), "optimal_coupling");
    double ms = t.ms();
    if (r == 0 || ms < wall_coupling) wall_coupling = ms;
    coupling_entries = twa_coupling_entry_count(coupling);
  }

  std::optional<double> oracle_delta;
  if (vertices <= 64) {
    MetricH metric;
    check(twa_metric_from_tree(tree, 0, metric.out()), "pairwise distances");
    double lp = 0;
    check(twa_transport_lp(metric, mu, nu, &lp, nullptr, nullptr), "transport oracle");
    oracle_delta = std::abs(value - lp);
  }

  std::ostringstream csv;
  csv << "stage,vertices,support,reps,millis\n";
  csv << "tree_wasserstein," << vertices << "," << support << "," << reps << "," << wall_dist << "\n";
  csv << "optimal_coupling," << vertices << "," << support << "," << reps << "," << wall_coupling << "\n";

  json& out = report.doc["outputs"];
  put_value(out, "wasserstein", value, value_exact);
  out["coupling_entries"] = coupling_entries;
  out["tree_wasserstein_ms"] = wall_dist;
  out["optimal_coupling_ms"] = wall_coupling;
  bool ok = true;
  if (oracle_delta) {
    out["oracle_delta"] = *oracle_delta;
    ok = *oracle_delta <= k_oracle_rel_tol * std::max(1.0, value);
    out["oracle_match"] = ok;
  }

  if (!out_path.empty()) write_file(out_path, csv.str());
  if (as_json) {
    report.print();
  } else {
    std::cout << csv.str();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"earthmover distances, optimal couplings and ell^1 embeddings on weighted trees"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(twa_version()));

  std::string tree_path, mu_path, nu_path, measure_path, input_path, embedding_path, out_path;
  bool exact = false, check_oracle = false, as_json = false, force_points = false, force_matrix = false;
  uint64_t seed = 0;
  uint32_t count = 1, pairs = 50, vertices = 1000, support = 256, reps = 3;

  CLI::App* dist = app.add_subcommand("dist", "Wasserstein distance between two measures on a tree");
  dist->add_option("tree", tree_path, "tree JSON file")->required();
  dist->add_option("mu", mu_path, "first measure JSON file")->required();
  dist->add_option("nu", nu_path, "second measure JSON file")->required();
  dist->add_flag("--check-oracle", check_oracle, "cross-check against the exact transport LP");
  dist->add_flag("--exact", exact, "exact rational arithmetic");

  CLI::App* coupling = app.add_subcommand("coupling", "explicit optimal coupling between two measures");
  coupling->add_option("tree", tree_path, "tree JSON file")->required();
  coupling->add_option("mu", mu_path, "first measure JSON file")->required();
  coupling->add_option("nu", nu_path, "second measure JSON file")->required();
  coupling->add_option("--out", out_path, "coupling JSON output file");
  coupling->add_flag("--exact", exact, "exact rational arithmetic");

  CLI::App* embed = app.add_subcommand("embed", "ell^1 edge embedding of a measure");
  embed->add_option("tree", tree_path, "tree JSON file")->required();
  embed->add_option("measure", measure_path, "measure JSON file")->required();
  embed->add_option("--out", out_path, "vector JSON output file");
  embed->add_flag("--exact", exact, "exact rational arithmetic");

  CLI::App* frt = app.add_subcommand("frt", "sample a stochastic tree embedding of a finite metric");
  frt->add_option("input", input_path, "distance-matrix CSV or point-set CSV")->required();
  frt->add_flag("--points", force_points, "input rows are point coordinates");
  frt->add_flag("--matrix", force_matrix, "input is a distance matrix");
  frt->add_option("--seed", seed, "rng seed (default 0)");
  frt->add_option("--count", count, "number of sampled trees (default 1)");
  frt->add_option("--out", out_path, "embedding JSON output file");
  frt->add_flag("--exact", exact, "exact rational arithmetic");

  CLI::App* audit = app.add_subcommand("audit", "distortion audit of an embedding over random measure pairs");
  audit->add_option("embedding", embedding_path, "embedding JSON file")->required();
  audit->add_option("--pairs", pairs, "number of random measure pairs (default 50)");
  audit->add_option("--seed", seed, "rng seed (default 0)");
  audit->add_flag("--exact", exact, "exact rational arithmetic");

  CLI::App* bench = app.add_subcommand("bench", "time the linear-time distance and the coupling construction");
  bench->add_option("--vertices", vertices, "tree size (default 1000)");
  bench->add_option("--seed", seed, "rng seed (default 0)");
  bench->add_option("--support", support, "measure support cap (default 256)");
  bench->add_option("--reps", reps, "repetitions, minimum is reported (default 3)");
  bench->add_flag("--json", as_json, "emit the run report instead of CSV");
  bench->add_option("--out", out_path, "CSV output file");
  bench->add_flag("--exact", exact, "exact rational arithmetic");

  CLI11_PARSE(app, argc, argv);

  if (dist->parsed()) return cmd_dist(tree_path, mu_path, nu_path, exact, check_oracle);
  if (coupling->parsed()) return cmd_coupling(tree_path, mu_path, nu_path, out_path, exact);
  if (embed->parsed()) return cmd_embed(tree_path, measure_path, out_path, exact);
  if (frt->parsed()) {
    if (force_points && force_matrix) die("--points and --matrix are mutually exclusive");
    FrtInput kind = force_points ? FrtInput::points : force_matrix ? FrtInput::matrix : FrtInput::automatic;
    return cmd_frt(input_path, kind, seed, count, out_path, exact);
  }
  if (audit->parsed()) return cmd_audit(embedding_path, pairs, seed, exact);
  if (bench->parsed()) return cmd_bench(vertices, seed, support, reps, as_json, out_path, exact);
  return 2;
}
