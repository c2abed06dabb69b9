#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "measure.hpp"
#include "metric.hpp"
#include "num.hpp"
#include "tree_ot.hpp"

namespace twa {

template <class R>
struct TransportResult {
  R value;
  Coupling<R> plan;
};

/// Exact minimum-cost transport between two measures on a finite metric,
/// by successive shortest augmenting paths with node potentials (reduced
/// costs stay non-negative, so plain Dijkstra applies throughout). Exact in
/// rational mode; float mode snaps sub-1e-15 residuals to zero.
template <class R>
TransportResult<R> transport_lp(const FiniteMetric<R>& metric, const Measure<R>& mu, const Measure<R>& nu,
                                uint32_t cap = k_oracle_cap) {
  for (const auto& [p, mass] : mu.entries()) metric.check_point(p);
  for (const auto& [p, mass] : nu.entries()) metric.check_point(p);
  if (mu.support_size() > cap || nu.support_size() > cap) {
    fail(errc::too_large, "measure support exceeds the oracle cap of " + std::to_string(cap));
  }
  if (!near(R(mu.total() - nu.total()), R(0), tolerance::measure_sum)) {
    fail(errc::infeasible_marginals, "marginals have different total mass");
  }

  const uint32_t a = static_cast<uint32_t>(mu.support_size());
  const uint32_t b = static_cast<uint32_t>(nu.support_size());
  std::vector<uint32_t> src_pt(a), dst_pt(b);
  std::vector<R> supply(a), demand(b);
  {
    uint32_t i = 0;
    for (const auto& [p, mass] : mu.entries()) {
      src_pt[i] = p;
      supply[i] = mass;
      ++i;
    }
    uint32_t j = 0;
    for (const auto& [p, mass] : nu.entries()) {
      dst_pt[j] = p;
      demand[j] = mass;
      ++j;
    }
  }

  auto cost = [&](uint32_t i, uint32_t j) -> const R& { return metric.at(src_pt[i], dst_pt[j]); };
  auto snap = [&](R& x) {
    if constexpr (!is_exact_v<R>) {
      if (x < tolerance::mass_flush) x = 0;
    }
  };

  std::vector<R> flow(static_cast<size_t>(a) * b, R(0));
  std::vector<R> pot_src(a, R(0)), pot_dst(b, R(0));

  const size_t nodes = static_cast<size_t>(a) + b;  // sources first, then sinks
  std::vector<R> dist(nodes);
  std::vector<char> done(nodes);
  std::vector<uint32_t> pred(nodes);  // predecessor node, k_no_vertex = path start

  auto remaining = [&] {
    R sum(0);
    for (const R& s : supply) sum += s;
    return sum;
  };

  const size_t max_rounds = 32 * nodes + 1024;
  size_t rounds = 0;
  while (true) {
    R left = remaining();
    snap(left);
    // float marginals may disagree by up to 2 * measure_sum; stop once the
    // residual is in that dust range
    if (near(left, R(0), 4 * tolerance::measure_sum)) break;
    if (++rounds > max_rounds) fail(errc::internal, "transport solver failed to converge");

    // Dijkstra from all sources with remaining supply, dense selection
    std::fill(done.begin(), done.end(), 0);
    std::fill(pred.begin(), pred.end(), k_no_vertex);
    std::vector<char> reached(nodes, 0);
    for (uint32_t i = 0; i < a; ++i) {
      if (supply[i] > R(0)) {
        dist[i] = R(0);
        reached[i] = 1;
      }
    }
    while (true) {
      size_t u = nodes;
      for (size_t k = 0; k < nodes; ++k) {
        if (!done[k] && reached[k] && (u == nodes || dist[k] < dist[u])) u = k;
      }
      if (u == nodes) break;
      done[u] = 1;
      if (u < a) {
        uint32_t i = static_cast<uint32_t>(u);
        for (uint32_t j = 0; j < b; ++j) {
          size_t v = a + j;
          if (done[v]) continue;
          R rc = cost(i, j) + pot_src[i] - pot_dst[j];
          if constexpr (!is_exact_v<R>) {
            if (rc < 0) rc = 0;  // rounding of an equality case
          }
          R cand = dist[u] + rc;
          if (!reached[v] || cand < dist[v]) {
            dist[v] = std::move(cand);
            reached[v] = 1;
            pred[v] = static_cast<uint32_t>(u);
          }
        }
      } else {
        uint32_t j = static_cast<uint32_t>(u - a);
        for (uint32_t i = 0; i < a; ++i) {
          if (done[i] || flow[static_cast<size_t>(i) * b + j] == R(0)) continue;
          R rc = pot_dst[j] - pot_src[i] - cost(i, j);
          if constexpr (!is_exact_v<R>) {
            if (rc < 0) rc = 0;
          } else {
            if (rc < 0) fail(errc::internal, "negative reduced cost on a flow arc");
          }
          R cand = dist[u] + rc;
          if (!reached[i] || cand < dist[i]) {
            dist[i] = std::move(cand);
            reached[i] = 1;
            pred[i] = static_cast<uint32_t>(u);
          }
        }
      }
    }

    // nearest sink with remaining demand
    size_t target = nodes;
    for (uint32_t j = 0; j < b; ++j) {
      size_t v = a + j;
      if (demand[j] > R(0) && reached[v] && (target == nodes || dist[v] < dist[target])) target = v;
    }
    if (target == nodes) fail(errc::internal, "no augmenting path despite remaining supply");

    // bottleneck along the path
    R bottleneck = demand[target - a];
    for (size_t v = target; pred[v] != k_no_vertex; v = pred[v]) {
      size_t u = pred[v];
      if (u >= a) {
        // backward arc sink u -> source v carries flow (v, u)
        const R& f = flow[static_cast<size_t>(v) * b + (u - a)];
        if (f < bottleneck) bottleneck = f;
      }
    }
    {
      size_t start = target;
      while (pred[start] != k_no_vertex) start = pred[start];
      if (supply[start] < bottleneck) bottleneck = supply[start];
    }
    if (!(bottleneck > R(0))) fail(errc::internal, "zero bottleneck in transport augmentation");

    for (size_t v = target; pred[v] != k_no_vertex; v = pred[v]) {
      size_t u = pred[v];
      if (u < a && v >= a) {
        flow[u * b + (v - a)] += bottleneck;
      } else {
        R& f = flow[v * b + (u - a)];
        f -= bottleneck;
        snap(f);
      }
    }
    {
      size_t start = target;
      while (pred[start] != k_no_vertex) start = pred[start];
      supply[start] -= bottleneck;
      snap(supply[start]);
      demand[target - a] -= bottleneck;
      snap(demand[target - a]);
    }

    // potential update keeps reduced costs non-negative
    const R reach_cap = dist[target];
    for (uint32_t i = 0; i < a; ++i) {
      if (reached[i]) pot_src[i] += dist[i] < reach_cap ? dist[i] : reach_cap;
    }
    for (uint32_t j = 0; j < b; ++j) {
      if (reached[a + j]) pot_dst[j] += dist[a + j] < reach_cap ? dist[a + j] : reach_cap;
    }
  }

  R value(0);
  std::vector<typename Coupling<R>::Entry> entries;
  for (uint32_t i = 0; i < a; ++i) {
    for (uint32_t j = 0; j < b; ++j) {
      const R& f = flow[static_cast<size_t>(i) * b + j];
      if (f == R(0)) continue;
      if (f < R(0)) fail(errc::internal, "negative transport flow");
      value += f * cost(i, j);
      entries.push_back({src_pt[i], dst_pt[j], f});
    }
  }
  return {std::move(value), Coupling<R>(std::move(entries), mu, nu)};
}

}  // namespace twa
