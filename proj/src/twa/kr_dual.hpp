#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "measure.hpp"
#include "metric.hpp"
#include "num.hpp"
#include "simplex.hpp"

namespace twa {

// The dense dual tableau grows as |S|^2 rows, so the practical cap is far
// below the primal oracle's.
inline constexpr uint32_t k_kr_cap = 32;

/// Kantorovich-Rubinstein dual value:
///   max  sum_x f(x) (mu(x) - nu(x))   s.t.  |f(x) - f(y)| <= d(x,y),
/// solved as a linear program over the union of the two supports (a
/// 1-Lipschitz f on the supports extends to the whole space without changing
/// the objective, so the optimum is unaffected). f is pinned to 0 at the
/// first support point to remove the translation degree of freedom.
template <class R>
R kr_dual_value(const FiniteMetric<R>& metric, const Measure<R>& mu, const Measure<R>& nu,
                uint32_t cap = k_kr_cap) {
  for (const auto& [p, mass] : mu.entries()) metric.check_point(p);
  for (const auto& [p, mass] : nu.entries()) metric.check_point(p);
  if (!near(R(mu.total() - nu.total()), R(0), tolerance::measure_sum)) {
    fail(errc::infeasible_marginals, "marginals have different total mass");
  }

  std::vector<uint32_t> points;
  for (const auto& [p, mass] : mu.entries()) points.push_back(p);
  for (const auto& [p, mass] : nu.entries()) points.push_back(p);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const uint32_t s = static_cast<uint32_t>(points.size());
  if (s <= 1) return R(0);
  if (s > cap) {
    fail(errc::too_large, "support union has " + std::to_string(s) + " points, dual cap is " + std::to_string(cap));
  }

  // variables: f_i = g_i - h_i for i = 1..s-1 (f_0 = 0)
  const uint32_t k = 2 * (s - 1);
  const uint32_t m = s * (s - 1);
  std::vector<R> a(static_cast<size_t>(m) * k, R(0));
  std::vector<R> b(m);
  std::vector<R> c(k, R(0));

  uint32_t row = 0;
  for (uint32_t i = 0; i < s; ++i) {
    for (uint32_t j = 0; j < s; ++j) {
      if (i == j) continue;
      R* r = a.data() + static_cast<size_t>(row) * k;
      if (i > 0) {
        r[2 * (i - 1)] = R(1);
        r[2 * (i - 1) + 1] = R(-1);
      }
      if (j > 0) {
        r[2 * (j - 1)] = R(-1);
        r[2 * (j - 1) + 1] = R(1);
      }
      b[row] = metric.at(points[i], points[j]);
      ++row;
    }
  }
  for (uint32_t i = 1; i < s; ++i) {
    R w = mu.mass_at(points[i]) - nu.mass_at(points[i]);
    c[2 * (i - 1)] = w;
    c[2 * (i - 1) + 1] = -w;
  }
  return simplex_max<R>(m, k, a, b, c);
}

}  // namespace twa
