#pragma once

// Independent ground truth for tiny transport instances: enumerate every
// spanning-tree basis of the bipartite supply/demand graph, solve each by
// leaf elimination, and take the cheapest feasible one. Every vertex of the
// transportation polytope is a basic solution of some spanning tree, so the
// minimum over feasible bases is the LP optimum. Kept deliberately separate
// from the library's solver.

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "twa/measure.hpp"
#include "twa/metric.hpp"
#include "twa/num.hpp"

namespace twatest {

template <class R>
R brute_force_transport(const twa::FiniteMetric<R>& metric, const twa::Measure<R>& mu, const twa::Measure<R>& nu) {
  std::vector<uint32_t> src, dst;
  std::vector<R> supply, demand;
  for (const auto& [p, m] : mu.entries()) {
    src.push_back(p);
    supply.push_back(m);
  }
  for (const auto& [p, m] : nu.entries()) {
    dst.push_back(p);
    demand.push_back(m);
  }
  const uint32_t a = static_cast<uint32_t>(src.size());
  const uint32_t b = static_cast<uint32_t>(dst.size());
  const uint32_t cells = a * b;
  if (cells > 20) twa::fail(twa::errc::too_large, "brute force handles supports up to 4x5 cells");

  const uint32_t nodes = a + b;
  const uint32_t basis_size = nodes - 1;
  std::optional<R> best;

  std::vector<uint32_t> parent(nodes);
  auto find = [&](uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (static_cast<uint32_t>(std::popcount(mask)) != basis_size) continue;

    // spanning tree check
    for (uint32_t i = 0; i < nodes; ++i) parent[i] = i;
    bool acyclic = true;
    for (uint32_t c = 0; c < cells && acyclic; ++c) {
      if (!(mask & (1u << c))) continue;
      uint32_t i = c / b, j = a + c % b;
      uint32_t ri = find(i), rj = find(j);
      if (ri == rj) {
        acyclic = false;
      } else {
        parent[ri] = rj;
      }
    }
    if (!acyclic) continue;  // n-1 acyclic edges over n nodes always span

    // leaf elimination
    std::vector<R> rem_supply = supply, rem_demand = demand;
    std::vector<uint32_t> degree(nodes, 0);
    std::vector<std::vector<uint32_t>> incident(nodes);
    for (uint32_t c = 0; c < cells; ++c) {
      if (!(mask & (1u << c))) continue;
      uint32_t i = c / b, j = a + c % b;
      ++degree[i];
      ++degree[j];
      incident[i].push_back(c);
      incident[j].push_back(c);
    }
    std::vector<char> cell_done(cells, 0);
    std::vector<R> value(cells, R(0));
    bool feasible = true;
    for (uint32_t step = 0; step < basis_size && feasible; ++step) {
      uint32_t leaf = nodes;
      for (uint32_t v = 0; v < nodes; ++v) {
        if (degree[v] == 1) {
          leaf = v;
          break;
        }
      }
      if (leaf == nodes) {
        feasible = false;
        break;
      }
      uint32_t cell = cells;
      for (uint32_t c : incident[leaf]) {
        if (!cell_done[c]) {
          cell = c;
          break;
        }
      }
      uint32_t i = cell / b, j = cell % b;
      R x = leaf < a ? rem_supply[leaf] : rem_demand[leaf - a];
      if (x < R(0)) {
        if constexpr (twa::is_exact_v<R>) {
          feasible = false;
        } else {
          if (x < -1e-9) feasible = false;
          x = 0;
        }
      }
      if (!feasible) break;
      value[cell] = x;
      cell_done[cell] = 1;
      --degree[i];
      --degree[a + j];
      rem_supply[i] -= x;
      rem_demand[j] -= x;
    }
    if (!feasible) continue;
    for (const R& r : rem_supply) {
      if (!twa::near(r, R(0), 1e-9)) feasible = false;
    }
    for (const R& r : rem_demand) {
      if (!twa::near(r, R(0), 1e-9)) feasible = false;
    }
    if (!feasible) continue;

    R cost(0);
    for (uint32_t c = 0; c < cells; ++c) {
      if (value[c] == R(0)) continue;
      if (value[c] < R(0)) {
        feasible = false;
        break;
      }
      cost += value[c] * metric.at(src[c / b], dst[c % b]);
    }
    if (!feasible) continue;
    if (!best || cost < *best) best = cost;
  }
  if (!best) twa::fail(twa::errc::internal, "brute force found no feasible basis");
  return *best;
}

}  // namespace twatest
