#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "num.hpp"

namespace twa {

inline constexpr uint32_t k_no_vertex = UINT32_MAX;

template <class R>
struct TreeEdge {
  uint32_t u = 0;
  uint32_t v = 0;
  R w{};
};

/// Rooted tree with strictly positive edge weights over dense vertex ids
/// 0..n-1. Immutable after build(); every query is pure and thread-safe.
///
/// Vertices carry a numbering ("order"): strictly deeper vertices always get
/// strictly lower numbers. The numbering is reverse-BFS: deepest level first,
/// left to right within a level. order()[k] holds number k+1.
template <class R>
class MetricTree {
 public:
  static MetricTree build(uint32_t vertex_count, std::span<const TreeEdge<R>> edges, uint32_t root) {
    MetricTree t;
    const uint32_t n = vertex_count;
    if (n == 0) fail(errc::invalid_argument, "tree must have at least one vertex");
    if (root >= n) {
      fail(errc::unknown_root, "root vertex " + std::to_string(root) + " not among 0.." + std::to_string(n - 1));
    }
    for (const auto& e : edges) {
      if (e.u >= n || e.v >= n) {
        fail(errc::unknown_vertex,
             "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") references a vertex outside 0.." +
                 std::to_string(n - 1));
      }
      if (e.u == e.v) {
        fail(errc::cycle_detected, "self-loop at vertex " + std::to_string(e.u));
      }
      if (!(e.w > R(0))) {
        fail(errc::non_positive_weight,
             "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") has non-positive weight");
      }
    }

    // adjacency with edge indices, neighbors in ascending id for determinism
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> adj(n);  // (neighbor, edge index)
    for (uint32_t i = 0; i < edges.size(); ++i) {
      adj[edges[i].u].emplace_back(edges[i].v, i);
      adj[edges[i].v].emplace_back(edges[i].u, i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    t.n_ = n;
    t.root_ = root;
    t.parent_.assign(n, k_no_vertex);
    t.depth_.assign(n, 0);
    t.weight_.assign(n, R(0));
    std::vector<uint32_t> via_edge(n, k_no_vertex);
    std::vector<char> visited(n, 0);
    std::vector<uint32_t> bfs;
    bfs.reserve(n);
    bfs.push_back(root);
    visited[root] = 1;
    for (size_t head = 0; head < bfs.size(); ++head) {
      uint32_t u = bfs[head];
      for (auto [v, ei] : adj[u]) {
        if (ei == via_edge[u]) continue;
        if (visited[v]) {
          fail(errc::cycle_detected,
               "edge (" + std::to_string(edges[ei].u) + "," + std::to_string(edges[ei].v) + ") closes a cycle");
        }
        visited[v] = 1;
        via_edge[v] = ei;
        t.parent_[v] = u;
        t.depth_[v] = t.depth_[u] + 1;
        t.weight_[v] = edges[ei].w;
        bfs.push_back(v);
      }
    }
    for (uint32_t v = 0; v < n; ++v) {
      if (!visited[v]) {
        fail(errc::disconnected, "vertex " + std::to_string(v) + " is not connected to the root");
      }
    }

    t.max_depth_ = 0;
    for (uint32_t v = 0; v < n; ++v) t.max_depth_ = std::max(t.max_depth_, t.depth_[v]);

    // children in CSR layout, kept in ascending id
    std::vector<uint32_t> child_count(n, 0);
    for (uint32_t v = 0; v < n; ++v) {
      if (v != root) ++child_count[t.parent_[v]];
    }
    t.child_off_.assign(n + 1, 0);
    for (uint32_t v = 0; v < n; ++v) t.child_off_[v + 1] = t.child_off_[v] + child_count[v];
    t.child_.assign(n > 1 ? n - 1 : 0, 0);
    std::vector<uint32_t> cursor(t.child_off_.begin(), t.child_off_.end() - 1);
    for (uint32_t v = 0; v < n; ++v) {
      if (v != root) t.child_[cursor[t.parent_[v]]++] = v;
    }

    // numbering: deepest level first, BFS encounter order within a level
    std::vector<std::vector<uint32_t>> by_depth(t.max_depth_ + 1);
    for (uint32_t v : bfs) by_depth[t.depth_[v]].push_back(v);
    t.order_.reserve(n);
    t.level_off_.assign(t.max_depth_ + 2, 0);
    for (uint32_t d = t.max_depth_ + 1; d-- > 0;) {
      t.level_off_[t.max_depth_ - d] = static_cast<uint32_t>(t.order_.size());
      for (uint32_t v : by_depth[d]) t.order_.push_back(v);
    }
    t.level_off_[t.max_depth_ + 1] = n;
    t.rank_.assign(n, 0);
    for (uint32_t k = 0; k < n; ++k) t.rank_[t.order_[k]] = k;

    // rank-ordered layout for the linear passes: sequential reads, parents at
    // strictly higher ranks
    t.parent_rank_.assign(n, n);
    t.weight_by_rank_.assign(n, R(0));
    for (uint32_t k = 0; k + 1 < n; ++k) {
      uint32_t v = t.order_[k];
      t.parent_rank_[k] = t.rank_[t.parent_[v]];
      t.weight_by_rank_[k] = t.weight_[v];
    }
    return t;
  }

  uint32_t size() const { return n_; }
  uint32_t root() const { return root_; }
  uint32_t max_depth() const { return max_depth_; }

  uint32_t parent(uint32_t v) const {
    check_vertex(v);
    return parent_[v];
  }

  uint32_t depth(uint32_t v) const {
    check_vertex(v);
    return depth_[v];
  }

  // weight of the edge between v and its parent; v must not be the root
  const R& edge_weight(uint32_t v) const {
    check_vertex(v);
    if (v == root_) fail(errc::invalid_argument, "root vertex has no parent edge");
    return weight_[v];
  }

  std::span<const uint32_t> children(uint32_t v) const {
    check_vertex(v);
    return {child_.data() + child_off_[v], child_off_[v + 1] - child_off_[v]};
  }

  std::span<const uint32_t> order() const { return order_; }

  // position of v in order(); lower rank = lower number = deeper
  uint32_t order_rank(uint32_t v) const {
    check_vertex(v);
    return rank_[v];
  }

  // rank-ordered companions to order(): parent_ranks()[k] is the rank of the
  // parent of order()[k] (undefined at the root, the last rank) and
  // rank_weights()[k] its parent-edge weight
  std::span<const uint32_t> parent_ranks() const { return parent_rank_; }
  std::span<const R> rank_weights() const { return weight_by_rank_; }

  // vertices at depth d, in ascending numbering
  std::span<const uint32_t> level(uint32_t d) const {
    if (d > max_depth_) return {};
    uint32_t block = max_depth_ - d;
    return {order_.data() + level_off_[block], level_off_[block + 1] - level_off_[block]};
  }

  R path_distance(uint32_t u, uint32_t v) const {
    check_vertex(u);
    check_vertex(v);
    R sum(0);
    while (depth_[u] > depth_[v]) {
      sum += weight_[u];
      u = parent_[u];
    }
    while (depth_[v] > depth_[u]) {
      sum += weight_[v];
      v = parent_[v];
    }
    while (u != v) {
      sum += weight_[u];
      sum += weight_[v];
      u = parent_[u];
      v = parent_[v];
    }
    return sum;
  }

  // v together with all of its descendants, in DFS order
  std::vector<uint32_t> subtree_of(uint32_t v) const {
    check_vertex(v);
    std::vector<uint32_t> out;
    std::vector<uint32_t> stack{v};
    while (!stack.empty()) {
      uint32_t u = stack.back();
      stack.pop_back();
      out.push_back(u);
      auto kids = children(u);
      for (size_t i = kids.size(); i-- > 0;) stack.push_back(kids[i]);
    }
    return out;
  }

  void check_vertex(uint32_t v) const {
    if (v >= n_) fail(errc::unknown_vertex, "unknown vertex id " + std::to_string(v));
  }

 private:
  uint32_t n_ = 0;
  uint32_t root_ = 0;
  uint32_t max_depth_ = 0;
  std::vector<uint32_t> parent_;
  std::vector<uint32_t> depth_;
  std::vector<R> weight_;
  std::vector<uint32_t> child_off_;
  std::vector<uint32_t> child_;
  std::vector<uint32_t> order_;
  std::vector<uint32_t> rank_;
  std::vector<uint32_t> level_off_;
  std::vector<uint32_t> parent_rank_;
  std::vector<R> weight_by_rank_;
};

}  // namespace twa
