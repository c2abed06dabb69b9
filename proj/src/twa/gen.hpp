#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "measure.hpp"
#include "num.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace twa {

// edge weight in [0.1, 10]; rational mode draws from the exact grid k/10
template <class R>
R random_weight(Rng& rng) {
  if constexpr (is_exact_v<R>) {
    return Rational(1 + static_cast<int64_t>(rng.next_below(100)), 10);
  } else {
    return rng.uniform(0.1, 10.0);
  }
}

/// Random recursive tree on n vertices rooted at 0: vertex i attaches to a
/// uniform earlier vertex.
template <class R>
MetricTree<R> random_tree(Rng& rng, uint32_t n) {
  if (n == 0) fail(errc::invalid_argument, "tree must have at least one vertex");
  std::vector<TreeEdge<R>> edges;
  edges.reserve(n - 1);
  for (uint32_t v = 1; v < n; ++v) {
    edges.push_back({static_cast<uint32_t>(rng.next_below(v)), v, random_weight<R>(rng)});
  }
  return MetricTree<R>::build(n, edges, 0);
}

/// Random measure over points 0..n-1: support size uniform in
/// [1, min(n, max_support)], support sampled without replacement, masses
/// symmetric Dirichlet with concentration 1 (rational mode: uniform integer
/// weights, normalized exactly).
template <class R>
Measure<R> random_measure(Rng& rng, uint32_t n, uint32_t max_support = 8) {
  if (n == 0) fail(errc::invalid_argument, "measure needs at least one point");
  uint32_t k = 1 + static_cast<uint32_t>(rng.next_below(std::min(n, max_support)));
  std::unordered_set<uint32_t> chosen;
  std::vector<uint32_t> support;
  while (support.size() < k) {
    uint32_t p = static_cast<uint32_t>(rng.next_below(n));
    if (chosen.insert(p).second) support.push_back(p);
  }
  std::vector<typename Measure<R>::Entry> pairs;
  if constexpr (is_exact_v<R>) {
    std::vector<int64_t> w(k);
    int64_t total = 0;
    for (auto& x : w) {
      x = 1 + static_cast<int64_t>(rng.next_below(1000));
      total += x;
    }
    for (uint32_t i = 0; i < k; ++i) pairs.emplace_back(support[i], Rational(w[i], total));
  } else {
    std::vector<double> w(k);
    double total = 0;
    for (auto& x : w) {
      x = -std::log(1.0 - rng.next_unit());
      total += x;
    }
    for (uint32_t i = 0; i < k; ++i) pairs.emplace_back(support[i], w[i] / total);
  }
  return Measure<R>::make(std::move(pairs));
}

template <class R>
std::pair<Measure<R>, Measure<R>> random_measure_pair(Rng& rng, uint32_t n, uint32_t max_support = 8) {
  Measure<R> mu = random_measure<R>(rng, n, max_support);
  Measure<R> nu = random_measure<R>(rng, n, max_support);
  return {std::move(mu), std::move(nu)};
}

}  // namespace twa
