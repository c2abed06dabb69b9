#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "measure.hpp"
#include "num.hpp"
#include "tree.hpp"

namespace twa {

#ifndef NDEBUG
namespace debug {
// vertex touches of the last linear-pass computation (debug builds only)
inline thread_local uint64_t vertex_touches = 0;
}  // namespace debug
#define TWA_COUNT_TOUCH(k) (twa::debug::vertex_touches += (k))
#else
#define TWA_COUNT_TOUCH(k) ((void)0)
#endif

/// Dense vector of subtree masses: out[v] = m(T_v) for every vertex v, by one
/// bottom-up accumulation in numbering order (children precede parents).
template <class R>
std::vector<R> subtree_mass_vector(const MetricTree<R>& t, const Measure<R>& m) {
#ifndef NDEBUG
  debug::vertex_touches = 0;
#endif
  std::vector<R> acc(t.size(), R(0));
  for (const auto& [v, mass] : m.entries()) {
    t.check_vertex(v);
    acc[v] = mass;
  }
  for (uint32_t v : t.order()) {
    TWA_COUNT_TOUCH(1);
    if (v != t.root() && !(acc[v] == R(0))) acc[t.parent(v)] += acc[v];
  }
  return acc;
}

/// Sparse edge -> m(T_e) map; each edge is named by its lower endpoint (the
/// child). Zero-mass edges are omitted. Ascending child id.
template <class R>
std::vector<std::pair<uint32_t, R>> subtree_masses(const MetricTree<R>& t, const Measure<R>& m) {
  std::vector<R> acc = subtree_mass_vector(t, m);
  std::vector<std::pair<uint32_t, R>> out;
  for (uint32_t v = 0; v < t.size(); ++v) {
    if (v != t.root() && !(acc[v] == R(0))) out.emplace_back(v, acc[v]);
  }
  return out;
}

/// Wasserstein distance on the tree: sum over edges of w_e * |mu(T_e) - nu(T_e)|.
/// Linear in the vertex count; a single bottom-up pass over the rank-ordered
/// layout accumulates the signed subtree-mass difference.
template <class R>
R tree_wasserstein(const MetricTree<R>& t, const Measure<R>& mu, const Measure<R>& nu) {
#ifndef NDEBUG
  debug::vertex_touches = 0;
#endif
  const uint32_t n = t.size();
  std::vector<R> diff(n, R(0));
  for (const auto& [v, mass] : mu.entries()) {
    t.check_vertex(v);
    diff[t.order_rank(v)] += mass;
  }
  for (const auto& [v, mass] : nu.entries()) {
    t.check_vertex(v);
    diff[t.order_rank(v)] -= mass;
  }
  auto parent_ranks = t.parent_ranks();
  auto weights = t.rank_weights();
  R sum(0);
  for (uint32_t k = 0; k + 1 < n; ++k) {  // the root holds the last rank
    TWA_COUNT_TOUCH(1);
    if (diff[k] == R(0)) continue;
    sum += weights[k] * abs_value(diff[k]);
    diff[parent_ranks[k]] += diff[k];
  }
  return sum;
}

/// Sparse ell^1 vector indexed by (block, edge). Plain tree embeddings live in
/// block 0; stochastic embeddings concatenate one block per component.
template <class R>
class EmbeddingVector {
 public:
  struct Entry {
    uint32_t block;
    uint32_t edge;  // child endpoint of the edge
    R value;
    bool operator==(const Entry&) const = default;
  };

  EmbeddingVector() = default;

  // entries must arrive sorted by (block, edge) and free of zeros
  static EmbeddingVector from_sorted(std::vector<Entry> entries) {
    EmbeddingVector v;
    v.entries_ = std::move(entries);
    return v;
  }

  std::span<const Entry> entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// Coordinate map of the isometric embedding: edge e -> w_e * m(T_e).
template <class R>
EmbeddingVector<R> embed_measure(const MetricTree<R>& t, const Measure<R>& m) {
  std::vector<R> acc = subtree_mass_vector(t, m);
  std::vector<typename EmbeddingVector<R>::Entry> entries;
  for (uint32_t v = 0; v < t.size(); ++v) {
    TWA_COUNT_TOUCH(1);
    if (v == t.root() || acc[v] == R(0)) continue;
    entries.push_back({0, v, t.edge_weight(v) * acc[v]});
  }
  return EmbeddingVector<R>::from_sorted(std::move(entries));
}

/// ell^1 distance between two sparse vectors; missing coordinates read as 0.
template <class R>
R l1_distance(const EmbeddingVector<R>& a, const EmbeddingVector<R>& b) {
  auto ea = a.entries();
  auto eb = b.entries();
  size_t i = 0, j = 0;
  R sum(0);
  auto key = [](const typename EmbeddingVector<R>::Entry& e) { return (uint64_t(e.block) << 32) | e.edge; };
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && key(ea[i]) < key(eb[j]))) {
      sum += abs_value(ea[i].value);
      ++i;
    } else if (i == ea.size() || key(eb[j]) < key(ea[i])) {
      sum += abs_value(eb[j].value);
      ++j;
    } else {
      sum += abs_value(R(ea[i].value - eb[j].value));
      ++i;
      ++j;
    }
  }
  return sum;
}

/// Sparse joint measure with prescribed marginals. Entries are oriented
/// (source in left, destination in right) and sorted by (src, dst).
template <class R>
class Coupling {
 public:
  struct Entry {
    uint32_t src;
    uint32_t dst;
    R mass;
  };

  Coupling(std::vector<Entry> entries, Measure<R> left, Measure<R> right)
      : entries_(std::move(entries)), left_(std::move(left)), right_(std::move(right)) {
    std::erase_if(entries_, [](const Entry& e) { return e.mass == R(0); });
    for (const auto& e : entries_) {
      if (e.mass < R(0)) fail(errc::invalid_argument, "coupling entry with negative mass");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return std::pair(a.src, a.dst) < std::pair(b.src, b.dst); });
  }

  std::span<const Entry> entries() const { return entries_; }
  const Measure<R>& left() const { return left_; }
  const Measure<R>& right() const { return right_; }

  R total_mass() const {
    R sum(0);
    for (const auto& e : entries_) sum += e.mass;
    return sum;
  }

  // Largest deviation of any row sum from left() or column sum from right().
  R max_marginal_deviation() const {
    std::vector<std::pair<uint32_t, R>> rows, cols;
    for (const auto& e : entries_) {
      rows.emplace_back(e.src, e.mass);
      cols.emplace_back(e.dst, e.mass);
    }
    auto fold = [](std::vector<std::pair<uint32_t, R>>& v) {
      std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      size_t out = 0;
      for (size_t i = 0; i < v.size(); ++i) {
        if (out > 0 && v[out - 1].first == v[i].first) {
          v[out - 1].second += v[i].second;
        } else {
          v[out++] = v[i];
        }
      }
      v.resize(out);
    };
    fold(rows);
    fold(cols);
    R worst(0);
    auto compare = [&](const std::vector<std::pair<uint32_t, R>>& sums, const Measure<R>& marginal) {
      size_t i = 0;
      for (const auto& [id, want] : marginal.entries()) {
        while (i < sums.size() && sums[i].first < id) {
          worst = std::max(worst, abs_value(sums[i].second));
          ++i;
        }
        R got(0);
        if (i < sums.size() && sums[i].first == id) {
          got = sums[i].second;
          ++i;
        }
        worst = std::max(worst, abs_value(R(got - want)));
      }
      for (; i < sums.size(); ++i) worst = std::max(worst, abs_value(sums[i].second));
    };
    compare(rows, left_);
    compare(cols, right_);
    return worst;
  }

 private:
  std::vector<Entry> entries_;
  Measure<R> left_;
  Measure<R> right_;
};

/// Transport cost of a coupling: sum of mass * path distance.
template <class R>
R coupling_cost(const MetricTree<R>& t, const Coupling<R>& c) {
  R sum(0);
  for (const auto& e : c.entries()) {
    if (!(e.src == e.dst)) sum += e.mass * t.path_distance(e.src, e.dst);
  }
  return sum;
}

namespace detail {

// provenance entry: mass held somewhere that originally belonged to src
template <class R>
struct Prov {
  uint32_t rank;  // numbering rank of src; lists stay sorted ascending
  uint32_t src;
  R mass;
};

// Moves `amount` of provenance from one holder to another, consuming entries
// in increasing numbering and splitting the boundary entry. In float mode,
// split remainders below tolerance::mass_flush are folded into the move so no
// dust entries survive.
template <class R>
void transfer_provenance(std::vector<Prov<R>>& from, std::vector<Prov<R>>& to, R amount) {
  std::vector<Prov<R>> moved;
  size_t consumed = 0;
  R remaining = std::move(amount);
  while (consumed < from.size() && remaining > R(0)) {
    if constexpr (!is_exact_v<R>) {
      if (remaining <= tolerance::mass_flush) break;  // never split off dust
    }
    Prov<R>& e = from[consumed];
    bool whole;
    if constexpr (is_exact_v<R>) {
      whole = e.mass <= remaining;
    } else {
      whole = e.mass <= remaining + tolerance::mass_flush;
    }
    if (whole) {
      moved.push_back(std::move(e));
      remaining -= moved.back().mass;
      if constexpr (!is_exact_v<R>) {
        if (remaining < 0) remaining = 0;
      }
      ++consumed;
    } else {
      moved.push_back({e.rank, e.src, remaining});
      e.mass -= remaining;
      remaining = R(0);
    }
  }
  from.erase(from.begin(), from.begin() + static_cast<ptrdiff_t>(consumed));

  // merge by rank, coalescing mass from the same source
  std::vector<Prov<R>> merged;
  merged.reserve(moved.size() + to.size());
  size_t i = 0, j = 0;
  while (i < to.size() || j < moved.size()) {
    bool take_to = j == moved.size() || (i < to.size() && to[i].rank <= moved[j].rank);
    Prov<R>& next = take_to ? to[i++] : moved[j++];
    if (!merged.empty() && merged.back().src == next.src) {
      merged.back().mass += next.mass;
    } else {
      merged.push_back(std::move(next));
    }
  }
  to = std::move(merged);
}

}  // namespace detail

/// Explicit optimal coupling via the two-phase mass-transport sweep.
///
/// A working measure starts at mu; every vertex holds a provenance list
/// (initially its own mass). Phase 1 walks levels deepest-first and, for each
/// edge whose subtree holds surplus mass (mu(T_e) > nu(T_e)), moves the
/// surplus one level up, consuming provenance in increasing numbering.
/// Phase 2 walks levels top-down and symmetrically lets deficits fall one
/// level. On termination the working measure equals nu and the provenance
/// table, read as (source, holder), is a coupling of cost
/// tree_wasserstein(t, mu, nu).
template <class R>
Coupling<R> optimal_coupling(const MetricTree<R>& t, const Measure<R>& mu, const Measure<R>& nu) {
  const uint32_t n = t.size();
  std::vector<R> below_mu = subtree_mass_vector(t, mu);
  std::vector<R> below_nu = subtree_mass_vector(t, nu);

  std::vector<std::vector<detail::Prov<R>>> prov(n);
  for (const auto& [v, mass] : mu.entries()) prov[v].push_back({t.order_rank(v), v, mass});

#ifndef NDEBUG
  auto total_held = [&] {
    R sum(0);
    for (const auto& list : prov) {
      for (const auto& e : list) sum += e.mass;
    }
    return sum;
  };
  const R start_total = total_held();
#endif
  auto sweep_audit = [&](const char* phase, uint32_t level) {
#ifndef NDEBUG
    if (!near(total_held(), start_total, tolerance::coupling_total)) {
      fail(errc::mass_leak, std::string("provenance mass drifted during ") + phase + " at depth " +
                                std::to_string(level));
    }
#else
    (void)phase;
    (void)level;
#endif
  };

  // phase 1: surplus climbs toward the root
  for (uint32_t d = t.max_depth(); d >= 1; --d) {
    for (uint32_t v : t.level(d)) {
      if (gt(below_mu[v], below_nu[v], tolerance::sweep_compare)) {
        detail::transfer_provenance(prov[v], prov[t.parent(v)], R(below_mu[v] - below_nu[v]));
      }
    }
    sweep_audit("phase 1", d);
  }
  // phase 2: deficits fall toward the leaves (each deficit edge pulls from
  // its upper endpoint; levels shallow to deep)
  for (uint32_t d = 1; d <= t.max_depth(); ++d) {
    for (uint32_t v : t.level(d)) {
      if (gt(below_nu[v], below_mu[v], tolerance::sweep_compare)) {
        detail::transfer_provenance(prov[t.parent(v)], prov[v], R(below_nu[v] - below_mu[v]));
      }
    }
    sweep_audit("phase 2", d);
  }

  std::vector<typename Coupling<R>::Entry> entries;
  R final_total(0);
  for (uint32_t holder = 0; holder < n; ++holder) {
    for (const auto& e : prov[holder]) {
      if (e.mass == R(0)) continue;
      if (e.mass < R(0)) fail(errc::mass_leak, "negative provenance mass after the sweeps");
      entries.push_back({e.src, holder, e.mass});
      final_total += e.mass;
    }
  }
  if (!near(final_total, R(1), tolerance::coupling_total)) {
    fail(errc::mass_leak,
         "coupling mass is " + std::to_string(to_double(final_total)) + " after the sweeps, expected 1");
  }
  return Coupling<R>(std::move(entries), mu, nu);
}

}  // namespace twa
