#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"
#include "num.hpp"

namespace twa {

/// Dense-tableau primal simplex for  max c.x  s.t.  A x <= b,  x >= 0  with
/// b >= 0 (the slack basis is feasible). Dantzig pricing with a permanent
/// switch to Bland's rule after a burn-in, so exact-mode runs terminate even
/// on degenerate instances. Returns the optimal value.
template <class R>
R simplex_max(uint32_t m, uint32_t k, const std::vector<R>& a, const std::vector<R>& b, const std::vector<R>& c) {
  if (a.size() != static_cast<size_t>(m) * k || b.size() != m || c.size() != k) {
    fail(errc::invalid_argument, "simplex input dimensions disagree");
  }
  for (const R& bi : b) {
    if (bi < R(0)) fail(errc::invalid_argument, "simplex requires b >= 0");
  }

  const uint32_t cols = k + m + 1;  // structural, slack, rhs
  const uint32_t rhs = cols - 1;
  std::vector<std::vector<R>> t(m + 1, std::vector<R>(cols, R(0)));
  for (uint32_t i = 0; i < m; ++i) {
    for (uint32_t j = 0; j < k; ++j) t[i][j] = a[static_cast<size_t>(i) * k + j];
    t[i][k + i] = R(1);
    t[i][rhs] = b[i];
  }
  for (uint32_t j = 0; j < k; ++j) t[m][j] = -c[j];

  std::vector<uint32_t> basis(m);
  for (uint32_t i = 0; i < m; ++i) basis[i] = k + i;

  const double eps = is_exact_v<R> ? 0.0 : 1e-9;
  const size_t bland_after = 4 * (static_cast<size_t>(m) + k) + 32;
  const size_t max_iters = 400 * (static_cast<size_t>(m) + k) + 10000;

  for (size_t iter = 0;; ++iter) {
    if (iter > max_iters) fail(errc::internal, "simplex iteration cap exceeded");
    const bool bland = iter >= bland_after;

    // entering column: reduced cost below zero
    uint32_t enter = cols;
    for (uint32_t j = 0; j < cols - 1; ++j) {
      if (lt(t[m][j], R(0), eps)) {
        if (bland) {
          enter = j;
          break;
        }
        if (enter == cols || t[m][j] < t[m][enter]) enter = j;
      }
    }
    if (enter == cols) return t[m][rhs];

    // ratio test; ties resolved by the lowest basis variable index
    uint32_t leave = m;
    for (uint32_t i = 0; i < m; ++i) {
      if (!gt(t[i][enter], R(0), eps)) continue;
      if (leave == m) {
        leave = i;
        continue;
      }
      // compare t[i][rhs]/t[i][enter] with t[leave][rhs]/t[leave][enter]
      R lhs = t[i][rhs] * t[leave][enter];
      R rhs_v = t[leave][rhs] * t[i][enter];
      if (lhs < rhs_v || (lhs == rhs_v && basis[i] < basis[leave])) leave = i;
    }
    if (leave == m) fail(errc::internal, "simplex objective is unbounded");

    // pivot on (leave, enter)
    R pivot = t[leave][enter];
    for (uint32_t j = 0; j < cols; ++j) {
      if (!(t[leave][j] == R(0))) t[leave][j] /= pivot;
    }
    t[leave][enter] = R(1);
    for (uint32_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const R factor = t[i][enter];
      if (factor == R(0)) continue;
      for (uint32_t j = 0; j < cols; ++j) {
        if (!(t[leave][j] == R(0))) t[i][j] -= factor * t[leave][j];
      }
      t[i][enter] = R(0);
    }
    basis[leave] = enter;
  }
}

}  // namespace twa
