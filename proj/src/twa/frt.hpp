#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "metric.hpp"
#include "num.hpp"
#include "rng.hpp"
#include "stochastic.hpp"
#include "tree.hpp"

namespace twa {

namespace detail {

// radius scale in [1,2) with density 1/(beta ln 2), i.e. beta = 2^U.
// Rational mode quantizes to 2^-20 so the scale stays exactly representable.
template <class R>
R sample_beta(Rng& rng) {
  double u = rng.next_unit();
  if constexpr (is_exact_v<R>) {
    auto q = static_cast<int64_t>(std::floor(std::exp2(u) * (1 << 20)));
    q = std::clamp<int64_t>(q, 1 << 20, (1 << 21) - 1);
    return Rational(q, 1 << 20);
  } else {
    return std::exp2(u);
  }
}

template <class R>
R pow2(uint32_t e) {
  R v(1);
  for (uint32_t i = 0; i < e; ++i) v += v;
  return v;
}

}  // namespace detail

/// One FRT-style hierarchical tree for the given permutation and radius scale.
/// Levels run 0 (singleton leaves) .. L (root cluster); a point joins the
/// cluster of the first permutation point within beta * 2^(i-1) * d_min at
/// level i, and the edge above a level-i node weighs beta * 2^i * d_min.
/// Leaf-to-leaf distances dominate the source metric by construction.
template <class R>
EmbeddingComponent<R> frt_component(const FiniteMetric<R>& m, const std::vector<uint32_t>& permutation,
                                    const R& beta) {
  const uint32_t n = m.size();
  if (n == 1) {
    MetricTree<R> tree = MetricTree<R>::build(1, std::span<const TreeEdge<R>>{}, 0);
    return {R(1), std::move(tree), {0}};
  }

  R d_min = m.at(0, 1), d_max = m.at(0, 1);
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j) {
      const R& d = m.at(i, j);
      if (d < d_min) d_min = d;
      if (d > d_max) d_max = d;
    }
  }

  // smallest L >= 1 with 2^(L-1) >= d_max / d_min
  uint32_t levels = 1;
  {
    R reach = d_min;
    while (reach < d_max) {
      reach += reach;
      ++levels;
      if (levels > 64) fail(errc::too_large, "metric aspect ratio too large for tree sampling");
    }
  }

  // cluster[p] at the current level; refined top-down by permutation order
  std::vector<uint32_t> cluster(n, 0);

  struct Node {
    uint32_t level;
    uint32_t parent;  // node index, self for root
  };
  std::vector<Node> nodes{{levels, 0}};
  std::vector<uint32_t> node_of_cluster{0};  // node index of each current-level cluster

  for (uint32_t level = levels; level-- > 1;) {
    R radius = beta * detail::pow2<R>(level - 1) * d_min;
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> next_ids;  // (old cluster, center) -> new id
    std::vector<uint32_t> next_cluster(n);
    std::vector<uint32_t> next_node;
    for (uint32_t p = 0; p < n; ++p) {
      uint32_t center = k_no_vertex;
      for (uint32_t c : permutation) {
        if (m.at(p, c) <= radius) {
          center = c;
          break;
        }
      }
      if (center == k_no_vertex) fail(errc::internal, "point not covered at its own radius");
      auto key = std::make_pair(cluster[p], center);
      auto [it, fresh] = next_ids.emplace(key, static_cast<uint32_t>(next_ids.size()));
      if (fresh) {
        next_node.push_back(static_cast<uint32_t>(nodes.size()));
        nodes.push_back({level, node_of_cluster[cluster[p]]});
      }
      next_cluster[p] = it->second;
    }
    cluster = std::move(next_cluster);
    node_of_cluster = std::move(next_node);
  }

  // level 0: one leaf per point
  std::vector<uint32_t> leaf(n);
  for (uint32_t p = 0; p < n; ++p) {
    leaf[p] = static_cast<uint32_t>(nodes.size());
    nodes.push_back({0, node_of_cluster[cluster[p]]});
  }

  std::vector<TreeEdge<R>> edges;
  edges.reserve(nodes.size() - 1);
  for (uint32_t v = 1; v < nodes.size(); ++v) {
    edges.push_back({nodes[v].parent, v, beta * detail::pow2<R>(nodes[v].level) * d_min});
  }
  MetricTree<R> tree = MetricTree<R>::build(static_cast<uint32_t>(nodes.size()), edges, 0);
  return {R(1), std::move(tree), std::move(leaf)};
}

/// `count` independent FRT trees, each with weight 1/count, drawn from
/// per-component substreams of `seed`. Every component is audited for
/// non-contraction before the embedding is returned.
template <class R>
StochasticEmbedding<R> frt_sample(const FiniteMetric<R>& m, uint64_t seed, uint32_t count) {
  if (count == 0) fail(errc::invalid_argument, "component count must be at least 1");
  if (m.size() == 0) fail(errc::empty_metric, "cannot sample trees over an empty metric");
  Rng root(seed);
  std::vector<EmbeddingComponent<R>> comps;
  comps.reserve(count);
  for (uint32_t k = 0; k < count; ++k) {
    Rng rng = root.fork(k);
    std::vector<uint32_t> permutation(m.size());
    for (uint32_t i = 0; i < m.size(); ++i) permutation[i] = i;
    rng.shuffle(permutation);
    R beta = detail::sample_beta<R>(rng);
    EmbeddingComponent<R> comp = frt_component(m, permutation, beta);
    comp.p = R(1) / R(static_cast<int>(count));
    comps.push_back(std::move(comp));
  }
  StochasticEmbedding<R> e(m, std::move(comps));
  if (m.size() >= 2) validate_embedding(e);  // asserts per-component non-contraction
  return e;
}

}  // namespace twa
