#include "treewass/treewass.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <utility>
#include <variant>

#include "twa/error.hpp"
#include "twa/frt.hpp"
#include "twa/gen.hpp"
#include "twa/io_csv.hpp"
#include "twa/io_json.hpp"
#include "twa/kr_dual.hpp"
#include "twa/measure.hpp"
#include "twa/metric.hpp"
#include "twa/num.hpp"
#include "twa/stochastic.hpp"
#include "twa/transport.hpp"
#include "twa/tree.hpp"
#include "twa/tree_ot.hpp"

using twa::Rational;

namespace {

thread_local std::string g_last_error;

twa_status map_errc(twa::errc c) {
  switch (c) {
    case twa::errc::ok: return TWA_OK;
    case twa::errc::cycle_detected: return TWA_ERR_CYCLE;
    case twa::errc::disconnected: return TWA_ERR_DISCONNECTED;
    case twa::errc::non_positive_weight: return TWA_ERR_NON_POSITIVE_WEIGHT;
    case twa::errc::unknown_root: return TWA_ERR_UNKNOWN_ROOT;
    case twa::errc::unknown_vertex: return TWA_ERR_UNKNOWN_VERTEX;
    case twa::errc::negative_mass: return TWA_ERR_NEGATIVE_MASS;
    case twa::errc::not_normalized: return TWA_ERR_NOT_NORMALIZED;
    case twa::errc::unmapped_point: return TWA_ERR_UNMAPPED_POINT;
    case twa::errc::too_large: return TWA_ERR_TOO_LARGE;
    case twa::errc::infeasible_marginals: return TWA_ERR_INFEASIBLE_MARGINALS;
    case twa::errc::mass_leak: return TWA_ERR_MASS_LEAK;
    case twa::errc::single_point: return TWA_ERR_SINGLE_POINT;
    case twa::errc::non_contraction_violated: return TWA_ERR_NON_CONTRACTION;
    case twa::errc::empty_metric: return TWA_ERR_EMPTY_METRIC;
    case twa::errc::parse_error: return TWA_ERR_PARSE;
    case twa::errc::invalid_argument: return TWA_ERR_INVALID_ARGUMENT;
    case twa::errc::internal: return TWA_ERR_INTERNAL;
  }
  return TWA_ERR_INTERNAL;
}

template <class F>
twa_status guarded(F&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return TWA_OK;
  } catch (const twa::Error& e) {
    g_last_error = e.what();
    return map_errc(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TWA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TWA_ERR_INTERNAL;
  }
}

void require(bool cond, const char* msg) {
  if (!cond) twa::fail(twa::errc::invalid_argument, msg);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class R>
void put_value(const R& v, double* out, char** out_exact) {
  if (out) *out = twa::to_double(v);
  if (out_exact) {
    if constexpr (twa::is_exact_v<R>) {
      *out_exact = dup_string(twa::exact_string(v));
    } else {
      *out_exact = nullptr;
    }
  }
}

// run a templated callable under the mode of a handle
template <class F>
void with_mode(twa_numeric mode, F&& f) {
  if (mode == TWA_NUM_DOUBLE) {
    f.template operator()<double>();
  } else if (mode == TWA_NUM_RATIONAL) {
    f.template operator()<Rational>();
  } else {
    twa::fail(twa::errc::invalid_argument, "unknown numeric mode");
  }
}

void require_same_mode(twa_numeric a, twa_numeric b) {
  require(a == b, "numeric modes of the arguments differ");
}

}  // namespace

struct twa_tree {
  twa_numeric mode;
  std::variant<twa::io::LabeledTree<double>, twa::io::LabeledTree<Rational>> v;
};
struct twa_measure {
  twa_numeric mode;
  std::variant<twa::Measure<double>, twa::Measure<Rational>> v;
};
struct twa_metric {
  twa_numeric mode;
  std::variant<twa::io::LabeledMetric<double>, twa::io::LabeledMetric<Rational>> v;
};
struct twa_coupling {
  twa_numeric mode;
  std::variant<twa::Coupling<double>, twa::Coupling<Rational>> v;
};
struct twa_vector {
  twa_numeric mode;
  std::variant<twa::EmbeddingVector<double>, twa::EmbeddingVector<Rational>> v;
};
struct twa_embedding {
  twa_numeric mode;
  std::variant<twa::io::LabeledEmbedding<double>, twa::io::LabeledEmbedding<Rational>> v;
};

namespace {

template <class R>
const twa::io::LabeledTree<R>& tree_of(const twa_tree* t) {
  return std::get<twa::io::LabeledTree<R>>(t->v);
}
template <class R>
const twa::Measure<R>& measure_of(const twa_measure* m) {
  return std::get<twa::Measure<R>>(m->v);
}
template <class R>
const twa::io::LabeledMetric<R>& metric_of(const twa_metric* m) {
  return std::get<twa::io::LabeledMetric<R>>(m->v);
}
template <class R>
const twa::Coupling<R>& coupling_of(const twa_coupling* c) {
  return std::get<twa::Coupling<R>>(c->v);
}
template <class R>
const twa::EmbeddingVector<R>& vector_of(const twa_vector* v) {
  return std::get<twa::EmbeddingVector<R>>(v->v);
}
template <class R>
const twa::io::LabeledEmbedding<R>& embedding_of(const twa_embedding* e) {
  return std::get<twa::io::LabeledEmbedding<R>>(e->v);
}

template <class R>
twa::Measure<R> measure_from_arrays(size_t count, const uint32_t* ids, const double* masses) {
  std::vector<typename twa::Measure<R>::Entry> pairs;
  pairs.reserve(count);
  for (size_t i = 0; i < count; ++i) pairs.emplace_back(ids[i], R(masses[i]));
  return twa::Measure<R>::make(std::move(pairs));
}

template <class R>
void check_support(const twa::Measure<R>& m, uint32_t n, const char* what) {
  if (m.support_size() > 0 && m.max_point_id() >= n) {
    twa::fail(twa::errc::unknown_vertex,
              std::string("measure is supported outside the ") + what + " (point id " +
                  std::to_string(m.max_point_id()) + ")");
  }
}

}  // namespace

extern "C" {

const char* twa_version(void) { return "1.0.0"; }

const char* twa_last_error(void) { return g_last_error.c_str(); }

void twa_str_free(char* s) { std::free(s); }

/* ------------------------------------------------------------------ */
/* trees                                                               */

twa_status twa_tree_from_json(const char* json, twa_numeric mode, twa_tree** out) {
  return guarded([&] {
    require(json && out, "json and out must be non-null");
    with_mode(mode, [&]<class R>() {
      *out = new twa_tree{mode, twa::io::tree_from_json<R>(json)};
    });
  });
}

twa_status twa_tree_build(uint32_t vertex_count, size_t edge_count, const uint32_t* u, const uint32_t* v,
                          const double* w, uint32_t root, twa_numeric mode, twa_tree** out) {
  return guarded([&] {
    require(out && (edge_count == 0 || (u && v && w)), "edge arrays and out must be non-null");
    with_mode(mode, [&]<class R>() {
      std::vector<twa::TreeEdge<R>> edges(edge_count);
      for (size_t i = 0; i < edge_count; ++i) edges[i] = {u[i], v[i], R(w[i])};
      twa::io::LabeledTree<R> lt{twa::MetricTree<R>::build(vertex_count, edges, root),
                                 twa::io::default_labels(vertex_count), {}};
      lt.index = twa::io::label_index(lt.labels);
      *out = new twa_tree{mode, std::move(lt)};
    });
  });
}

twa_status twa_tree_to_json(const twa_tree* t, char** out_json) {
  return guarded([&] {
    require(t && out_json, "tree and out must be non-null");
    with_mode(t->mode, [&]<class R>() { *out_json = dup_string(twa::io::tree_to_json(tree_of<R>(t))); });
  });
}

void twa_tree_free(twa_tree* t) { delete t; }

uint32_t twa_tree_vertex_count(const twa_tree* t) {
  if (!t) return 0;
  uint32_t n = 0;
  with_mode(t->mode, [&]<class R>() { n = tree_of<R>(t).tree.size(); });
  return n;
}

twa_numeric twa_tree_mode(const twa_tree* t) { return t ? t->mode : TWA_NUM_DOUBLE; }

twa_status twa_tree_vertex(const twa_tree* t, const char* label, uint32_t* out_id) {
  return guarded([&] {
    require(t && label && out_id, "tree, label and out must be non-null");
    with_mode(t->mode, [&]<class R>() { *out_id = tree_of<R>(t).id_of(label); });
  });
}

const char* twa_tree_vertex_label(const twa_tree* t, uint32_t id) {
  if (!t) return nullptr;
  const char* res = nullptr;
  with_mode(t->mode, [&]<class R>() {
    const auto& labels = tree_of<R>(t).labels;
    if (id < labels.size()) res = labels[id].c_str();
  });
  return res;
}

twa_status twa_tree_path_distance(const twa_tree* t, uint32_t u, uint32_t v, double* out) {
  return guarded([&] {
    require(t && out, "tree and out must be non-null");
    with_mode(t->mode, [&]<class R>() { *out = twa::to_double(tree_of<R>(t).tree.path_distance(u, v)); });
  });
}

twa_status twa_tree_subtree_size(const twa_tree* t, uint32_t v, uint32_t* out) {
  return guarded([&] {
    require(t && out, "tree and out must be non-null");
    with_mode(t->mode, [&]<class R>() {
      *out = static_cast<uint32_t>(tree_of<R>(t).tree.subtree_of(v).size());
    });
  });
}

/* ------------------------------------------------------------------ */
/* measures                                                            */

twa_status twa_measure_on_tree_from_json(const twa_tree* t, const char* json, twa_measure** out) {
  return guarded([&] {
    require(t && json && out, "tree, json and out must be non-null");
    with_mode(t->mode, [&]<class R>() {
      *out = new twa_measure{t->mode, twa::io::measure_from_json<R>(tree_of<R>(t).index, json, "tree")};
    });
  });
}

twa_status twa_measure_on_tree(const twa_tree* t, size_t count, const uint32_t* ids, const double* masses,
                               twa_measure** out) {
  return guarded([&] {
    require(t && out && (count == 0 || (ids && masses)), "tree, arrays and out must be non-null");
    with_mode(t->mode, [&]<class R>() {
      auto m = measure_from_arrays<R>(count, ids, masses);
      check_support(m, tree_of<R>(t).tree.size(), "tree");
      *out = new twa_measure{t->mode, std::move(m)};
    });
  });
}

twa_status twa_measure_on_metric_from_json(const twa_metric* m, const char* json, twa_measure** out) {
  return guarded([&] {
    require(m && json && out, "metric, json and out must be non-null");
    with_mode(m->mode, [&]<class R>() {
      *out = new twa_measure{m->mode, twa::io::measure_from_json<R>(metric_of<R>(m).index, json, "metric")};
    });
  });
}

twa_status twa_measure_on_metric(const twa_metric* m, size_t count, const uint32_t* ids, const double* masses,
                                 twa_measure** out) {
  return guarded([&] {
    require(m && out && (count == 0 || (ids && masses)), "metric, arrays and out must be non-null");
    with_mode(m->mode, [&]<class R>() {
      auto meas = measure_from_arrays<R>(count, ids, masses);
      check_support(meas, metric_of<R>(m).metric.size(), "metric");
      *out = new twa_measure{m->mode, std::move(meas)};
    });
  });
}

twa_status twa_measure_to_json_tree(const twa_tree* t, const twa_measure* m, char** out_json) {
  return guarded([&] {
    require(t && m && out_json, "tree, measure and out must be non-null");
    require_same_mode(t->mode, m->mode);
    with_mode(t->mode, [&]<class R>() {
      check_support(measure_of<R>(m), tree_of<R>(t).tree.size(), "tree");
      *out_json = dup_string(twa::io::measure_to_json(tree_of<R>(t).labels, measure_of<R>(m)));
    });
  });
}

uint32_t twa_measure_support_size(const twa_measure* m) {
  if (!m) return 0;
  uint32_t n = 0;
  with_mode(m->mode, [&]<class R>() { n = static_cast<uint32_t>(measure_of<R>(m).support_size()); });
  return n;
}

void twa_measure_free(twa_measure* m) { delete m; }

/* ------------------------------------------------------------------ */
/* transport on trees                                                  */

twa_status twa_tree_wasserstein(const twa_tree* t, const twa_measure* mu, const twa_measure* nu, double* out,
                                char** out_exact) {
  return guarded([&] {
    require(t && mu && nu && out, "tree, measures and out must be non-null");
    require_same_mode(t->mode, mu->mode);
    require_same_mode(t->mode, nu->mode);
    with_mode(t->mode, [&]<class R>() {
      const auto& lt = tree_of<R>(t);
      check_support(measure_of<R>(mu), lt.tree.size(), "tree");
      check_support(measure_of<R>(nu), lt.tree.size(), "tree");
      put_value(twa::tree_wasserstein(lt.tree, measure_of<R>(mu), measure_of<R>(nu)), out, out_exact);
    });
  });
}

twa_status twa_optimal_coupling(const twa_tree* t, const twa_measure* mu, const twa_measure* nu,
                                twa_coupling** out) {
  return guarded([&] {
    require(t && mu && nu && out, "tree, measures and out must be non-null");
    require_same_mode(t->mode, mu->mode);
    require_same_mode(t->mode, nu->mode);
    with_mode(t->mode, [&]<class R>() {
      const auto& lt = tree_of<R>(t);
      check_support(measure_of<R>(mu), lt.tree.size(), "tree");
      check_support(measure_of<R>(nu), lt.tree.size(), "tree");
      *out = new twa_coupling{t->mode, twa::optimal_coupling(lt.tree, measure_of<R>(mu), measure_of<R>(nu))};
    });
  });
}

twa_status twa_embed_measure(const twa_tree* t, const twa_measure* m, twa_vector** out) {
  return guarded([&] {
    require(t && m && out, "tree, measure and out must be non-null");
    require_same_mode(t->mode, m->mode);
    with_mode(t->mode, [&]<class R>() {
      const auto& lt = tree_of<R>(t);
      check_support(measure_of<R>(m), lt.tree.size(), "tree");
      *out = new twa_vector{t->mode, twa::embed_measure(lt.tree, measure_of<R>(m))};
    });
  });
}

twa_status twa_vector_l1(const twa_vector* a, const twa_vector* b, double* out, char** out_exact) {
  return guarded([&] {
    require(a && b && out, "vectors and out must be non-null");
    require_same_mode(a->mode, b->mode);
    with_mode(a->mode, [&]<class R>() { put_value(twa::l1_distance(vector_of<R>(a), vector_of<R>(b)), out, out_exact); });
  });
}

size_t twa_vector_entry_count(const twa_vector* v) {
  if (!v) return 0;
  size_t n = 0;
  with_mode(v->mode, [&]<class R>() { n = vector_of<R>(v).size(); });
  return n;
}

twa_status twa_vector_to_json_tree(const twa_tree* t, const twa_vector* v, char** out_json) {
  return guarded([&] {
    require(t && v && out_json, "tree, vector and out must be non-null");
    require_same_mode(t->mode, v->mode);
    with_mode(t->mode, [&]<class R>() {
      *out_json = dup_string(twa::io::vector_to_json(tree_of<R>(t), vector_of<R>(v)));
    });
  });
}

void twa_vector_free(twa_vector* v) { delete v; }

size_t twa_coupling_entry_count(const twa_coupling* c) {
  if (!c) return 0;
  size_t n = 0;
  with_mode(c->mode, [&]<class R>() { n = coupling_of<R>(c).entries().size(); });
  return n;
}

twa_status twa_coupling_entry(const twa_coupling* c, size_t i, uint32_t* src, uint32_t* dst, double* mass) {
  return guarded([&] {
    require(c, "coupling must be non-null");
    with_mode(c->mode, [&]<class R>() {
      auto entries = coupling_of<R>(c).entries();
      require(i < entries.size(), "coupling entry index out of range");
      if (src) *src = entries[i].src;
      if (dst) *dst = entries[i].dst;
      if (mass) *mass = twa::to_double(entries[i].mass);
    });
  });
}

twa_status twa_coupling_marginal_deviation(const twa_coupling* c, double* out) {
  return guarded([&] {
    require(c && out, "coupling and out must be non-null");
    with_mode(c->mode, [&]<class R>() { *out = twa::to_double(coupling_of<R>(c).max_marginal_deviation()); });
  });
}

twa_status twa_coupling_cost_tree(const twa_tree* t, const twa_coupling* c, double* out, char** out_exact) {
  return guarded([&] {
    require(t && c && out, "tree, coupling and out must be non-null");
    require_same_mode(t->mode, c->mode);
    with_mode(t->mode, [&]<class R>() {
      put_value(twa::coupling_cost(tree_of<R>(t).tree, coupling_of<R>(c)), out, out_exact);
    });
  });
}

twa_status twa_coupling_cost_metric(const twa_metric* m, const twa_coupling* c, double* out, char** out_exact) {
  return guarded([&] {
    require(m && c && out, "metric, coupling and out must be non-null");
    require_same_mode(m->mode, c->mode);
    with_mode(m->mode, [&]<class R>() {
      const auto& metric = metric_of<R>(m).metric;
      R sum(0);
      for (const auto& e : coupling_of<R>(c).entries()) sum += e.mass * metric.at(e.src, e.dst);
      put_value(sum, out, out_exact);
    });
  });
}

twa_status twa_coupling_to_json_tree(const twa_tree* t, const twa_coupling* c, char** out_json) {
  return guarded([&] {
    require(t && c && out_json, "tree, coupling and out must be non-null");
    require_same_mode(t->mode, c->mode);
    with_mode(t->mode, [&]<class R>() {
      const auto& lt = tree_of<R>(t);
      R cost = twa::coupling_cost(lt.tree, coupling_of<R>(c));
      *out_json = dup_string(twa::io::coupling_to_json(lt.labels, coupling_of<R>(c), cost));
    });
  });
}

twa_status twa_coupling_to_json_metric(const twa_metric* m, const twa_coupling* c, char** out_json) {
  return guarded([&] {
    require(m && c && out_json, "metric, coupling and out must be non-null");
    require_same_mode(m->mode, c->mode);
    with_mode(m->mode, [&]<class R>() {
      const auto& lm = metric_of<R>(m);
      R cost(0);
      for (const auto& e : coupling_of<R>(c).entries()) cost += e.mass * lm.metric.at(e.src, e.dst);
      *out_json = dup_string(twa::io::coupling_to_json(lm.labels, coupling_of<R>(c), cost));
    });
  });
}

void twa_coupling_free(twa_coupling* c) { delete c; }

/* ------------------------------------------------------------------ */
/* finite metrics and the transport oracle                             */

twa_status twa_metric_from_csv(const char* text, twa_numeric mode, twa_metric** out) {
  return guarded([&] {
    require(text && out, "text and out must be non-null");
    with_mode(mode, [&]<class R>() {
      *out = new twa_metric{mode, twa::io::metric_from_matrix_csv<R>(text)};
    });
  });
}

twa_status twa_metric_from_points_csv(const char* text, twa_metric** out) {
  return guarded([&] {
    require(text && out, "text and out must be non-null");
    *out = new twa_metric{TWA_NUM_DOUBLE, twa::io::metric_from_points_csv(text)};
  });
}

twa_status twa_metric_from_tree(const twa_tree* t, uint32_t cap, twa_metric** out) {
  return guarded([&] {
    require(t && out, "tree and out must be non-null");
    with_mode(t->mode, [&]<class R>() {
      const auto& lt = tree_of<R>(t);
      auto metric = twa::pairwise_distances(lt.tree, cap == 0 ? twa::k_oracle_cap : cap);
      twa::io::LabeledMetric<R> lm{std::move(metric), lt.labels, lt.index};
      *out = new twa_metric{t->mode, std::move(lm)};
    });
  });
}

uint32_t twa_metric_point_count(const twa_metric* m) {
  if (!m) return 0;
  uint32_t n = 0;
  with_mode(m->mode, [&]<class R>() { n = metric_of<R>(m).metric.size(); });
  return n;
}

twa_numeric twa_metric_mode(const twa_metric* m) { return m ? m->mode : TWA_NUM_DOUBLE; }

twa_status twa_metric_distance(const twa_metric* m, uint32_t i, uint32_t j, double* out) {
  return guarded([&] {
    require(m && out, "metric and out must be non-null");
    with_mode(m->mode, [&]<class R>() { *out = twa::to_double(metric_of<R>(m).metric.at(i, j)); });
  });
}

twa_status twa_metric_point(const twa_metric* m, const char* label, uint32_t* out_id) {
  return guarded([&] {
    require(m && label && out_id, "metric, label and out must be non-null");
    with_mode(m->mode, [&]<class R>() { *out_id = metric_of<R>(m).id_of(label); });
  });
}

const char* twa_metric_point_label(const twa_metric* m, uint32_t id) {
  if (!m) return nullptr;
  const char* res = nullptr;
  with_mode(m->mode, [&]<class R>() {
    const auto& labels = metric_of<R>(m).labels;
    if (id < labels.size()) res = labels[id].c_str();
  });
  return res;
}

void twa_metric_free(twa_metric* m) { delete m; }

twa_status twa_transport_lp(const twa_metric* m, const twa_measure* mu, const twa_measure* nu, double* out_value,
                            char** out_exact, twa_coupling** out_coupling) {
  return guarded([&] {
    require(m && mu && nu && out_value, "metric, measures and out must be non-null");
    require_same_mode(m->mode, mu->mode);
    require_same_mode(m->mode, nu->mode);
    with_mode(m->mode, [&]<class R>() {
      auto result = twa::transport_lp(metric_of<R>(m).metric, measure_of<R>(mu), measure_of<R>(nu));
      put_value(result.value, out_value, out_exact);
      if (out_coupling) *out_coupling = new twa_coupling{m->mode, std::move(result.plan)};
    });
  });
}

twa_status twa_kr_dual(const twa_metric* m, const twa_measure* mu, const twa_measure* nu, double* out_value,
                       char** out_exact) {
  return guarded([&] {
    require(m && mu && nu && out_value, "metric, measures and out must be non-null");
    require_same_mode(m->mode, mu->mode);
    require_same_mode(m->mode, nu->mode);
    with_mode(m->mode, [&]<class R>() {
      put_value(twa::kr_dual_value(metric_of<R>(m).metric, measure_of<R>(mu), measure_of<R>(nu)), out_value,
                out_exact);
    });
  });
}

/* ------------------------------------------------------------------ */
/* stochastic embeddings                                               */

twa_status twa_frt_sample(const twa_metric* m, uint64_t seed, uint32_t count, twa_embedding** out) {
  return guarded([&] {
    require(m && out, "metric and out must be non-null");
    with_mode(m->mode, [&]<class R>() {
      const auto& lm = metric_of<R>(m);
      auto embedding = twa::frt_sample(lm.metric, seed, count);
      *out = new twa_embedding{m->mode, twa::io::label_embedding(std::move(embedding), lm.labels)};
    });
  });
}

twa_status twa_embedding_from_json(const char* json, twa_numeric mode, twa_embedding** out) {
  return guarded([&] {
    require(json && out, "json and out must be non-null");
    with_mode(mode, [&]<class R>() {
      *out = new twa_embedding{mode, twa::io::embedding_from_json<R>(json)};
    });
  });
}

twa_status twa_embedding_to_json(const twa_embedding* e, char** out_json) {
  return guarded([&] {
    require(e && out_json, "embedding and out must be non-null");
    with_mode(e->mode, [&]<class R>() { *out_json = dup_string(twa::io::embedding_to_json(embedding_of<R>(e))); });
  });
}

uint32_t twa_embedding_component_count(const twa_embedding* e) {
  if (!e) return 0;
  uint32_t n = 0;
  with_mode(e->mode, [&]<class R>() {
    n = static_cast<uint32_t>(embedding_of<R>(e).embedding.components().size());
  });
  return n;
}

twa_status twa_embedding_source(const twa_embedding* e, twa_metric** out) {
  return guarded([&] {
    require(e && out, "embedding and out must be non-null");
    with_mode(e->mode, [&]<class R>() {
      const auto& le = embedding_of<R>(e);
      twa::io::LabeledMetric<R> lm{le.embedding.source(), le.point_labels, twa::io::label_index(le.point_labels)};
      *out = new twa_metric{e->mode, std::move(lm)};
    });
  });
}

void twa_embedding_free(twa_embedding* e) { delete e; }

twa_status twa_embedding_validate(const twa_embedding* e, double* min_ratio, double* max_ratio, uint32_t* argmax_a,
                                  uint32_t* argmax_b, int* flags, size_t flags_len) {
  return guarded([&] {
    require(e, "embedding must be non-null");
    with_mode(e->mode, [&]<class R>() {
      const auto& le = embedding_of<R>(e);
      auto report = twa::validate_embedding(le.embedding);
      if (min_ratio) *min_ratio = twa::to_double(report.min_ratio);
      if (max_ratio) *max_ratio = twa::to_double(report.max_ratio);
      if (argmax_a) *argmax_a = report.argmax_a;
      if (argmax_b) *argmax_b = report.argmax_b;
      if (flags) {
        require(flags_len >= report.component_noncontracting.size(), "flags buffer too small");
        for (size_t i = 0; i < report.component_noncontracting.size(); ++i) {
          flags[i] = report.component_noncontracting[i];
        }
      }
    });
  });
}

twa_status twa_lift_measure(const twa_embedding* e, const twa_measure* m, uint32_t component, twa_measure** out) {
  return guarded([&] {
    require(e && m && out, "embedding, measure and out must be non-null");
    require_same_mode(e->mode, m->mode);
    with_mode(e->mode, [&]<class R>() {
      const auto& le = embedding_of<R>(e);
      require(component < le.embedding.components().size(), "component index out of range");
      check_support(measure_of<R>(m), le.embedding.source().size(), "metric");
      const auto& comp = le.embedding.components()[component];
      *out = new twa_measure{e->mode, twa::pushforward<R>(comp.f, measure_of<R>(m))};
    });
  });
}

twa_status twa_wasserstein_l1_map(const twa_embedding* e, const twa_measure* m, twa_vector** out) {
  return guarded([&] {
    require(e && m && out, "embedding, measure and out must be non-null");
    require_same_mode(e->mode, m->mode);
    with_mode(e->mode, [&]<class R>() {
      const auto& le = embedding_of<R>(e);
      check_support(measure_of<R>(m), le.embedding.source().size(), "metric");
      *out = new twa_vector{e->mode, twa::wasserstein_l1_map(le.embedding, measure_of<R>(m))};
    });
  });
}

twa_status twa_wasserstein_audit(const twa_embedding* e, uint32_t pairs, uint64_t seed, twa_audit_result* out) {
  return guarded([&] {
    require(e && out, "embedding and out must be non-null");
    require(pairs > 0, "at least one sample pair is required");
    with_mode(e->mode, [&]<class R>() {
      const auto& le = embedding_of<R>(e);
      const auto& source = le.embedding.source();
      auto point_report = twa::validate_embedding(le.embedding);

      twa::Rng rng(seed);
      std::vector<std::pair<twa::Measure<R>, twa::Measure<R>>> samples;
      samples.reserve(pairs);
      for (uint32_t k = 0; k < pairs; ++k) {
        samples.push_back(twa::random_measure_pair<R>(rng, source.size()));
      }
      uint32_t skipped = 0;
      auto pair_report = twa::wasserstein_distortion_audit<R>(le.embedding, samples, &skipped);

      out->point_min_ratio = twa::to_double(point_report.min_ratio);
      out->point_max_ratio = twa::to_double(point_report.max_ratio);
      out->point_argmax_a = point_report.argmax_a;
      out->point_argmax_b = point_report.argmax_b;
      out->pair_min_ratio = twa::to_double(pair_report.min_ratio);
      out->pair_max_ratio = twa::to_double(pair_report.max_ratio);
      out->pair_argmax = pair_report.argmax_a;
      out->pairs_evaluated = pairs - skipped;
      out->pairs_skipped = skipped;

      R cap = point_report.max_ratio;
      if constexpr (!twa::is_exact_v<R>) cap *= 1.0 + twa::tolerance::audit_slack;
      bool ok_low = !twa::lt(pair_report.min_ratio, R(1), twa::tolerance::audit_slack);
      bool ok_high = !(pair_report.max_ratio > cap);
      out->sandwich_ok = ok_low && ok_high;
      int all_ok = 1;
      for (char f : point_report.component_noncontracting) all_ok &= f;
      out->sandwich_ok = out->sandwich_ok && all_ok;
    });
  });
}

/* ------------------------------------------------------------------ */
/* random instances                                                    */

twa_status twa_random_tree(uint32_t vertex_count, uint64_t seed, twa_numeric mode, twa_tree** out) {
  return guarded([&] {
    require(out, "out must be non-null");
    require(vertex_count >= 2, "random trees need at least two vertices");
    with_mode(mode, [&]<class R>() {
      twa::Rng rng(seed);
      twa::io::LabeledTree<R> lt{twa::random_tree<R>(rng, vertex_count), twa::io::default_labels(vertex_count), {}};
      lt.index = twa::io::label_index(lt.labels);
      *out = new twa_tree{mode, std::move(lt)};
    });
  });
}

twa_status twa_random_measure_pair_on_tree(const twa_tree* t, uint64_t seed, uint32_t max_support,
                                           twa_measure** out_mu, twa_measure** out_nu) {
  return guarded([&] {
    require(t && out_mu && out_nu, "tree and outs must be non-null");
    require(max_support > 0, "max_support must be positive");
    with_mode(t->mode, [&]<class R>() {
      twa::Rng rng(seed);
      auto [mu, nu] = twa::random_measure_pair<R>(rng, tree_of<R>(t).tree.size(), max_support);
      *out_mu = new twa_measure{t->mode, std::move(mu)};
      *out_nu = new twa_measure{t->mode, std::move(nu)};
    });
  });
}

twa_status twa_random_measure_pair_on_metric(const twa_metric* m, uint64_t seed, uint32_t max_support,
                                             twa_measure** out_mu, twa_measure** out_nu) {
  return guarded([&] {
    require(m && out_mu && out_nu, "metric and outs must be non-null");
    require(max_support > 0, "max_support must be positive");
    with_mode(m->mode, [&]<class R>() {
      twa::Rng rng(seed);
      auto [mu, nu] = twa::random_measure_pair<R>(rng, metric_of<R>(m).metric.size(), max_support);
      *out_mu = new twa_measure{m->mode, std::move(mu)};
      *out_nu = new twa_measure{m->mode, std::move(nu)};
    });
  });
}

}  // extern "C"
