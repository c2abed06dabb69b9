#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "num.hpp"
#include "tree.hpp"

namespace twa {

inline constexpr uint32_t k_oracle_cap = 256;

/// Dense finite metric: symmetric, zero diagonal, strictly positive off the
/// diagonal, triangle inequality (exact in rational mode, small relative
/// slack in float mode). Immutable after construction.
template <class R>
class FiniteMetric {
 public:
  // `trusted` skips the O(n^3) triangle sweep for matrices that are metrics
  // by construction (tree path distances).
  static FiniteMetric from_matrix(uint32_t n, std::vector<R> dist, bool trusted = false) {
    if (n == 0) fail(errc::empty_metric, "metric must have at least one point");
    if (dist.size() != static_cast<size_t>(n) * n) {
      fail(errc::invalid_argument, "distance matrix is not " + std::to_string(n) + "x" + std::to_string(n));
    }
    FiniteMetric m;
    m.n_ = n;
    m.d_ = std::move(dist);
    m.validate(trusted);
    return m;
  }

  uint32_t size() const { return n_; }

  const R& at(uint32_t i, uint32_t j) const {
    check_point(i);
    check_point(j);
    return d_[static_cast<size_t>(i) * n_ + j];
  }

  void check_point(uint32_t i) const {
    if (i >= n_) fail(errc::unknown_vertex, "unknown point id " + std::to_string(i));
  }

  bool operator==(const FiniteMetric&) const = default;

 private:
  void validate(bool trusted) const {
    for (uint32_t i = 0; i < n_; ++i) {
      if (!(d_[static_cast<size_t>(i) * n_ + i] == R(0))) {
        fail(errc::invalid_argument, "nonzero diagonal at point " + std::to_string(i));
      }
      for (uint32_t j = i + 1; j < n_; ++j) {
        const R& dij = d_[static_cast<size_t>(i) * n_ + j];
        if (!(dij == d_[static_cast<size_t>(j) * n_ + i])) {
          fail(errc::invalid_argument,
               "asymmetric distances between points " + std::to_string(i) + " and " + std::to_string(j));
        }
        if (!(dij > R(0))) {
          fail(errc::invalid_argument,
               "distance between distinct points " + std::to_string(i) + " and " + std::to_string(j) +
                   " must be positive");
        }
      }
    }
    if (trusted) return;
    for (uint32_t i = 0; i < n_; ++i) {
      for (uint32_t j = 0; j < n_; ++j) {
        for (uint32_t k = 0; k < n_; ++k) {
          const R& dij = d_[static_cast<size_t>(i) * n_ + j];
          R via = d_[static_cast<size_t>(i) * n_ + k] + d_[static_cast<size_t>(k) * n_ + j];
          double slack = tolerance::metric_triangle;
          if constexpr (!is_exact_v<R>) slack *= std::max(1.0, to_double(via));
          if (gt(dij, via, slack)) {
            fail(errc::invalid_argument, "triangle inequality fails for points (" + std::to_string(i) + "," +
                                             std::to_string(j) + "," + std::to_string(k) + ")");
          }
        }
      }
    }
  }

  uint32_t n_ = 0;
  std::vector<R> d_;
};

/// Materializes the tree's path metric as a dense matrix. Meant for the
/// verification oracle, so n is capped (default 256).
template <class R>
FiniteMetric<R> pairwise_distances(const MetricTree<R>& t, uint32_t cap = k_oracle_cap) {
  const uint32_t n = t.size();
  if (n > cap) {
    fail(errc::too_large,
         "tree has " + std::to_string(n) + " vertices, oracle cap is " + std::to_string(cap));
  }
  std::vector<R> d(static_cast<size_t>(n) * n, R(0));
  std::vector<R> row(n, R(0));
  // one DFS per source; only the upper triangle is kept so the matrix is
  // exactly symmetric even under float rounding
  for (uint32_t s = 0; s < n; ++s) {
    std::vector<uint32_t> stack{s};
    std::vector<char> seen(n, 0);
    seen[s] = 1;
    row[s] = R(0);
    while (!stack.empty()) {
      uint32_t u = stack.back();
      stack.pop_back();
      auto push = [&](uint32_t v, const R& w) {
        if (seen[v]) return;
        seen[v] = 1;
        row[v] = row[u] + w;
        stack.push_back(v);
      };
      if (u != t.root()) push(t.parent(u), t.edge_weight(u));
      for (uint32_t c : t.children(u)) push(c, t.edge_weight(c));
    }
    for (uint32_t v = s + 1; v < n; ++v) {
      d[static_cast<size_t>(s) * n + v] = row[v];
      d[static_cast<size_t>(v) * n + s] = row[v];
    }
  }
  return FiniteMetric<R>::from_matrix(n, std::move(d), /*trusted=*/true);
}

}  // namespace twa
