#pragma once

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "measure.hpp"
#include "metric.hpp"
#include "num.hpp"
#include "stochastic.hpp"
#include "tree.hpp"
#include "tree_ot.hpp"

namespace twa::io {

// ---------------------------------------------------------------------------
// Parsed JSON value tree. Numbers keep their raw literal text so rational
// mode can read decimals exactly (0.1 -> 1/10, not the nearest double).
// ---------------------------------------------------------------------------

struct JValue {
  enum class Kind { null, boolean, number, string, array, object };
  Kind kind = Kind::null;
  bool flag = false;
  std::string text;  // raw literal for numbers, value for strings
  std::vector<JValue> items;
  std::vector<std::pair<std::string, JValue>> members;
};

namespace detail {

struct SaxDom {
  using number_integer_t = int64_t;
  using number_unsigned_t = uint64_t;
  using number_float_t = double;
  using string_t = std::string;
  using binary_t = nlohmann::json::binary_t;

  JValue root;
  bool have_root = false;
  std::vector<JValue*> open;
  std::string pending_key;

  JValue* place(JValue&& v) {
    if (open.empty()) {
      root = std::move(v);
      have_root = true;
      return &root;
    }
    JValue* top = open.back();
    if (top->kind == JValue::Kind::array) {
      top->items.push_back(std::move(v));
      return &top->items.back();
    }
    top->members.emplace_back(std::move(pending_key), std::move(v));
    return &top->members.back().second;
  }

  bool null() {
    place(JValue{});
    return true;
  }
  bool boolean(bool v) {
    JValue j;
    j.kind = JValue::Kind::boolean;
    j.flag = v;
    place(std::move(j));
    return true;
  }
  bool number_integer(number_integer_t v) {
    JValue j;
    j.kind = JValue::Kind::number;
    j.text = std::to_string(v);
    place(std::move(j));
    return true;
  }
  bool number_unsigned(number_unsigned_t v) {
    JValue j;
    j.kind = JValue::Kind::number;
    j.text = std::to_string(v);
    place(std::move(j));
    return true;
  }
  bool number_float(number_float_t, const string_t& raw) {
    JValue j;
    j.kind = JValue::Kind::number;
    j.text = raw;
    place(std::move(j));
    return true;
  }
  bool string(string_t& v) {
    JValue j;
    j.kind = JValue::Kind::string;
    j.text = v;
    place(std::move(j));
    return true;
  }
  bool binary(binary_t&) { return false; }
  bool start_object(size_t) {
    JValue j;
    j.kind = JValue::Kind::object;
    open.push_back(place(std::move(j)));
    return true;
  }
  bool key(string_t& k) {
    pending_key = k;
    return true;
  }
  bool end_object() {
    open.pop_back();
    return true;
  }
  bool start_array(size_t) {
    JValue j;
    j.kind = JValue::Kind::array;
    open.push_back(place(std::move(j)));
    return true;
  }
  bool end_array() {
    open.pop_back();
    return true;
  }
  bool parse_error(size_t position, const std::string&, const nlohmann::json::exception& ex) {
    fail(errc::parse_error, "JSON parse error at byte " + std::to_string(position) + ": " + ex.what());
  }
};

}  // namespace detail

inline JValue json_parse(std::string_view text) {
  detail::SaxDom dom;
  nlohmann::json::sax_parse(text, &dom);
  if (!dom.have_root) fail(errc::parse_error, "empty JSON document");
  return std::move(dom.root);
}

inline const JValue& expect(const JValue& v, JValue::Kind kind, std::string_view what) {
  if (v.kind != kind) fail(errc::parse_error, "expected " + std::string(what));
  return v;
}

inline const JValue* find_member(const JValue& obj, std::string_view key) {
  for (const auto& [k, v] : obj.members) {
    if (k == key) return &v;
  }
  return nullptr;
}

inline const JValue& require_member(const JValue& obj, std::string_view key, std::string_view what) {
  expect(obj, JValue::Kind::object, std::string(what) + " (object)");
  const JValue* v = find_member(obj, key);
  if (!v) fail(errc::parse_error, "missing \"" + std::string(key) + "\" in " + std::string(what));
  return *v;
}

inline const std::string& as_string(const JValue& v, std::string_view what) {
  if (v.kind != JValue::Kind::string) fail(errc::parse_error, "expected string for " + std::string(what));
  return v.text;
}

// numbers may arrive as JSON numbers or as "p/q" strings (exact-mode exports)
template <class R>
R as_number(const JValue& v, std::string_view what) {
  if (v.kind != JValue::Kind::number && v.kind != JValue::Kind::string) {
    fail(errc::parse_error, "expected number for " + std::string(what));
  }
  return parse_number<R>(v.text, what);
}

// ---------------------------------------------------------------------------
// Deterministic JSON writer. Number tokens are shortest round-trip literals;
// exact values that no decimal literal reproduces are written as "p/q"
// strings, which the parser above accepts back.
// ---------------------------------------------------------------------------

inline std::string shortest_double_token(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <class R>
std::pair<bool, std::string> number_token(const R& v) {
  if constexpr (is_exact_v<R>) {
    double approx = to_double(v);
    if (std::isfinite(approx)) {
      std::string token = shortest_double_token(approx);
      if (parse_number<Rational>(token, "round-trip") == v) return {true, token};
    }
    return {false, exact_string(v)};
  } else {
    return {true, shortest_double_token(v)};
  }
}

class JsonWriter {
 public:
  std::string take() { return std::move(out_); }

  void begin_object() {
    comma();
    out_ += '{';
    fresh_.push_back(true);
  }
  void end_object() {
    out_ += '}';
    fresh_.pop_back();
  }
  void begin_array() {
    comma();
    out_ += '[';
    fresh_.push_back(true);
  }
  void end_array() {
    out_ += ']';
    fresh_.pop_back();
  }
  void key(std::string_view name) {
    comma();
    literal_string(name);
    out_ += ':';
    pending_value_ = true;
  }
  void value_string(std::string_view s) {
    comma();
    literal_string(s);
  }
  template <class R>
  void value_number(const R& v) {
    auto [is_num, token] = number_token(v);
    comma();
    if (is_num) {
      out_ += token;
    } else {
      literal_string(token);
    }
  }
  void value_raw(std::string_view token) {
    comma();
    out_ += token;
  }
  void value_uint(uint64_t v) {
    comma();
    out_ += std::to_string(v);
  }

 private:
  void comma() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!fresh_.empty()) {
      if (!fresh_.back()) out_ += ',';
      fresh_.back() = false;
    }
  }
  void literal_string(std::string_view s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<char> fresh_;
  bool pending_value_ = false;
};

// ---------------------------------------------------------------------------
// Labeled wrappers: external string labels are mapped to dense ids here, at
// the parse boundary, and back on export.
// ---------------------------------------------------------------------------

template <class R>
struct LabeledTree {
  MetricTree<R> tree;
  std::vector<std::string> labels;
  std::unordered_map<std::string, uint32_t> index;

  uint32_t id_of(const std::string& label) const {
    auto it = index.find(label);
    if (it == index.end()) fail(errc::unknown_vertex, "label \"" + label + "\" is not a vertex of the tree");
    return it->second;
  }
};

template <class R>
struct LabeledMetric {
  FiniteMetric<R> metric;
  std::vector<std::string> labels;
  std::unordered_map<std::string, uint32_t> index;

  uint32_t id_of(const std::string& label) const {
    auto it = index.find(label);
    if (it == index.end()) fail(errc::unknown_vertex, "label \"" + label + "\" is not a point of the metric");
    return it->second;
  }
};

template <class R>
struct LabeledEmbedding {
  StochasticEmbedding<R> embedding;
  std::vector<std::string> point_labels;               // source points
  std::vector<std::vector<std::string>> tree_labels;   // per component, vertex id -> label
};

inline std::vector<std::string> default_labels(uint32_t n) {
  std::vector<std::string> labels(n);
  for (uint32_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

inline std::unordered_map<std::string, uint32_t> label_index(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, uint32_t> index;
  index.reserve(labels.size());
  for (uint32_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], i).second) {
      fail(errc::parse_error, "duplicate label \"" + labels[i] + "\"");
    }
  }
  return index;
}

// {"root": "<label>", "edges": [{"u": "<label>", "v": "<label>", "w": <number>}, ...]}
template <class R>
LabeledTree<R> tree_from_jvalue(const JValue& doc) {
  const JValue& root_v = require_member(doc, "root", "tree");
  const JValue& edges_v = require_member(doc, "edges", "tree");
  expect(edges_v, JValue::Kind::array, "tree \"edges\" array");

  std::vector<std::string> labels;
  std::unordered_map<std::string, uint32_t> index;
  auto intern = [&](const std::string& label) {
    auto [it, fresh] = index.emplace(label, static_cast<uint32_t>(labels.size()));
    if (fresh) labels.push_back(label);
    return it->second;
  };
  uint32_t root = intern(as_string(root_v, "tree root"));

  std::vector<TreeEdge<R>> edges;
  edges.reserve(edges_v.items.size());
  for (const JValue& e : edges_v.items) {
    uint32_t u = intern(as_string(require_member(e, "u", "tree edge"), "edge endpoint"));
    uint32_t v = intern(as_string(require_member(e, "v", "tree edge"), "edge endpoint"));
    R w = as_number<R>(require_member(e, "w", "tree edge"), "edge weight");
    edges.push_back({u, v, std::move(w)});
  }
  LabeledTree<R> out{MetricTree<R>::build(static_cast<uint32_t>(labels.size()), edges, root), std::move(labels),
                     std::move(index)};
  return out;
}

template <class R>
LabeledTree<R> tree_from_json(std::string_view text) {
  return tree_from_jvalue<R>(json_parse(text));
}

template <class R>
void write_tree(JsonWriter& w, const LabeledTree<R>& lt) {
  w.begin_object();
  w.key("root");
  w.value_string(lt.labels[lt.tree.root()]);
  w.key("edges");
  w.begin_array();
  for (uint32_t v = 0; v < lt.tree.size(); ++v) {
    if (v == lt.tree.root()) continue;
    w.begin_object();
    w.key("u");
    w.value_string(lt.labels[lt.tree.parent(v)]);
    w.key("v");
    w.value_string(lt.labels[v]);
    w.key("w");
    w.value_number(lt.tree.edge_weight(v));
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

template <class R>
std::string tree_to_json(const LabeledTree<R>& lt) {
  JsonWriter w;
  write_tree(w, lt);
  return w.take();
}

// {"masses": {"<label>": <number>, ...}}
template <class R>
Measure<R> measure_from_json(const std::unordered_map<std::string, uint32_t>& index, std::string_view text,
                             std::string_view what) {
  JValue doc = json_parse(text);
  const JValue& masses = require_member(doc, "masses", "measure");
  expect(masses, JValue::Kind::object, "measure \"masses\" object");
  std::vector<typename Measure<R>::Entry> pairs;
  pairs.reserve(masses.members.size());
  for (const auto& [label, mass_v] : masses.members) {
    auto it = index.find(label);
    if (it == index.end()) {
      fail(errc::unknown_vertex, "label \"" + label + "\" in measure is not a point of the " + std::string(what));
    }
    pairs.emplace_back(it->second, as_number<R>(mass_v, "mass of \"" + label + "\""));
  }
  return Measure<R>::make(std::move(pairs));
}

template <class R>
std::string measure_to_json(const std::vector<std::string>& labels, const Measure<R>& m) {
  JsonWriter w;
  w.begin_object();
  w.key("masses");
  w.begin_object();
  for (const auto& [id, mass] : m.entries()) {
    w.key(labels[id]);
    w.value_number(mass);
  }
  w.end_object();
  w.end_object();
  return w.take();
}

// {"entries": [{"from": "<label>", "to": "<label>", "mass": <number>}], "cost": <number>}
template <class R>
std::string coupling_to_json(const std::vector<std::string>& labels, const Coupling<R>& c, const R& cost) {
  JsonWriter w;
  w.begin_object();
  w.key("entries");
  w.begin_array();
  for (const auto& e : c.entries()) {
    w.begin_object();
    w.key("from");
    w.value_string(labels[e.src]);
    w.key("to");
    w.value_string(labels[e.dst]);
    w.key("mass");
    w.value_number(e.mass);
    w.end_object();
  }
  w.end_array();
  w.key("cost");
  w.value_number(cost);
  w.end_object();
  return w.take();
}

// {"source": {"points": [...], "dist": [[...], ...]},
//  "components": [{"p": <number>, "tree": <tree>, "f": {"<point>": "<vertex>"}}]}
template <class R>
LabeledEmbedding<R> embedding_from_json(std::string_view text) {
  JValue doc = json_parse(text);
  const JValue& source_v = require_member(doc, "source", "embedding");
  const JValue& points_v = require_member(source_v, "points", "embedding source");
  expect(points_v, JValue::Kind::array, "embedding source \"points\" array");
  std::vector<std::string> point_labels;
  point_labels.reserve(points_v.items.size());
  for (const JValue& p : points_v.items) point_labels.push_back(as_string(p, "source point label"));
  label_index(point_labels);  // reject duplicates
  const uint32_t n = static_cast<uint32_t>(point_labels.size());

  const JValue& dist_v = require_member(source_v, "dist", "embedding source");
  expect(dist_v, JValue::Kind::array, "embedding source \"dist\" matrix");
  if (dist_v.items.size() != n) fail(errc::parse_error, "source \"dist\" row count does not match points");
  std::vector<R> dist;
  dist.reserve(static_cast<size_t>(n) * n);
  for (const JValue& row : dist_v.items) {
    expect(row, JValue::Kind::array, "source \"dist\" row");
    if (row.items.size() != n) fail(errc::parse_error, "source \"dist\" is not square");
    for (const JValue& cell : row.items) dist.push_back(as_number<R>(cell, "source distance"));
  }
  FiniteMetric<R> source = FiniteMetric<R>::from_matrix(n, std::move(dist));

  const JValue& comps_v = require_member(doc, "components", "embedding");
  expect(comps_v, JValue::Kind::array, "embedding \"components\" array");
  std::vector<EmbeddingComponent<R>> comps;
  std::vector<std::vector<std::string>> tree_labels;
  for (const JValue& comp_v : comps_v.items) {
    R p = as_number<R>(require_member(comp_v, "p", "embedding component"), "component weight");
    LabeledTree<R> lt = tree_from_jvalue<R>(require_member(comp_v, "tree", "embedding component"));
    const JValue& f_v = require_member(comp_v, "f", "embedding component");
    expect(f_v, JValue::Kind::object, "component \"f\" map");
    std::vector<uint32_t> f(n, k_unmapped);
    for (const auto& [point, vertex_v] : f_v.members) {
      auto it = std::find(point_labels.begin(), point_labels.end(), point);
      if (it == point_labels.end()) {
        fail(errc::unmapped_point, "map key \"" + point + "\" is not a source point");
      }
      f[static_cast<uint32_t>(it - point_labels.begin())] =
          lt.id_of(as_string(vertex_v, "map image of \"" + point + "\""));
    }
    for (uint32_t i = 0; i < n; ++i) {
      if (f[i] == k_unmapped) {
        fail(errc::unmapped_point, "source point \"" + point_labels[i] + "\" has no image in a component");
      }
    }
    tree_labels.push_back(std::move(lt.labels));
    comps.push_back({std::move(p), std::move(lt.tree), std::move(f)});
  }
  StochasticEmbedding<R> embedding(std::move(source), std::move(comps));
  if (embedding.source().size() >= 2) validate_embedding(embedding);  // enforce non-contraction on load
  return {std::move(embedding), std::move(point_labels), std::move(tree_labels)};
}

template <class R>
std::string embedding_to_json(const LabeledEmbedding<R>& le) {
  const auto& source = le.embedding.source();
  JsonWriter w;
  w.begin_object();
  w.key("source");
  w.begin_object();
  w.key("points");
  w.begin_array();
  for (const auto& label : le.point_labels) w.value_string(label);
  w.end_array();
  w.key("dist");
  w.begin_array();
  for (uint32_t i = 0; i < source.size(); ++i) {
    w.begin_array();
    for (uint32_t j = 0; j < source.size(); ++j) w.value_number(source.at(i, j));
    w.end_array();
  }
  w.end_array();
  w.end_object();
  w.key("components");
  w.begin_array();
  for (size_t i = 0; i < le.embedding.components().size(); ++i) {
    const auto& comp = le.embedding.components()[i];
    w.begin_object();
    w.key("p");
    w.value_number(comp.p);
    w.key("tree");
    LabeledTree<R> lt{comp.tree, le.tree_labels[i], {}};
    write_tree(w, lt);
    w.key("f");
    w.begin_object();
    for (uint32_t p = 0; p < le.point_labels.size(); ++p) {
      w.key(le.point_labels[p]);
      w.value_string(le.tree_labels[i][comp.f[p]]);
    }
    w.end_object();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

/// Attaches labels to a sampled embedding: leaves take their point's label,
/// internal vertices get synthetic "~id" names (disambiguated on collision).
template <class R>
LabeledEmbedding<R> label_embedding(StochasticEmbedding<R> embedding, std::vector<std::string> point_labels) {
  std::vector<std::vector<std::string>> tree_labels;
  for (const auto& comp : embedding.components()) {
    std::vector<std::string> labels(comp.tree.size());
    std::vector<char> taken(comp.tree.size(), 0);
    for (uint32_t p = 0; p < point_labels.size(); ++p) {
      labels[comp.f[p]] = point_labels[p];
      taken[comp.f[p]] = 1;
    }
    std::unordered_map<std::string, uint32_t> used = label_index(point_labels);
    for (uint32_t v = 0; v < comp.tree.size(); ++v) {
      if (taken[v]) continue;
      std::string candidate = "~" + std::to_string(v);
      while (used.contains(candidate)) candidate += "'";
      used.emplace(candidate, v);
      labels[v] = candidate;
    }
    tree_labels.push_back(std::move(labels));
  }
  return {std::move(embedding), std::move(point_labels), std::move(tree_labels)};
}

// {"entries": [{"edge": "<child label>", "value": <number>}, ...]}
template <class R>
std::string vector_to_json(const LabeledTree<R>& lt, const EmbeddingVector<R>& v) {
  JsonWriter w;
  w.begin_object();
  w.key("entries");
  w.begin_array();
  for (const auto& e : v.entries()) {
    w.begin_object();
    if (e.block != 0) {
      w.key("component");
      w.value_uint(e.block);
    }
    w.key("edge");
    w.value_string(lt.labels[e.edge]);
    w.key("value");
    w.value_number(e.value);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return w.take();
}

}  // namespace twa::io
