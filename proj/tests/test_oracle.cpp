#include <doctest.h>

#include <vector>

#include "support/brute_force.hpp"
#include "twa/gen.hpp"
#include "twa/kr_dual.hpp"
#include "twa/metric.hpp"
#include "twa/rng.hpp"
#include "twa/transport.hpp"
#include "twa/tree_ot.hpp"

using namespace twa;

namespace {

template <class R>
MetricTree<R> star4() {
  std::vector<TreeEdge<R>> edges{{0, 1, R(1)}, {0, 2, R(2)}, {0, 3, R(3)}};
  return MetricTree<R>::build(4, edges, 0);
}

}  // namespace

TEST_CASE_TEMPLATE("pairwise_distances materializes the path metric", R, double, Rational) {
  std::vector<TreeEdge<R>> path_edges{{0, 1, R(1)}, {1, 2, R(2)}};
  auto path = MetricTree<R>::build(3, path_edges, 0);
  auto m = pairwise_distances(path);
  CHECK(m.at(0, 1) == R(1));
  CHECK(m.at(0, 2) == R(3));
  CHECK(m.at(1, 2) == R(2));
  CHECK(m.at(2, 2) == R(0));

  auto single = MetricTree<R>::build(1, {}, 0);
  CHECK(pairwise_distances(single).size() == 1);

  auto star = star4<R>();
  auto sm = pairwise_distances(star);
  CHECK(sm.at(1, 2) == R(3));
  CHECK(sm.at(1, 3) == R(4));
  CHECK(sm.at(2, 3) == R(5));

  try {
    pairwise_distances(star, 3);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_large);
  }
}

TEST_CASE("FiniteMetric validation rejects non-metrics") {
  CHECK_THROWS_AS(FiniteMetric<double>::from_matrix(2, {0, 1, 2, 0}), Error);     // asymmetric
  CHECK_THROWS_AS(FiniteMetric<double>::from_matrix(2, {0.5, 1, 1, 0}), Error);   // nonzero diagonal
  CHECK_THROWS_AS(FiniteMetric<double>::from_matrix(2, {0, 0, 0, 0}), Error);     // zero off-diagonal
  CHECK_THROWS_AS(FiniteMetric<double>::from_matrix(2, {0, 1, 1}), Error);        // not square
  // triangle: d(0,2)=5 > 1+1
  std::vector<double> bad{0, 1, 5, 1, 0, 1, 5, 1, 0};
  CHECK_THROWS_AS(FiniteMetric<double>::from_matrix(3, bad), Error);
  std::vector<Rational> good{Rational(0), Rational(1), Rational(1), Rational(0)};
  CHECK_NOTHROW(FiniteMetric<Rational>::from_matrix(2, good));
}

TEST_CASE_TEMPLATE("transport_lp on the worked shapes", R, double, Rational) {
  auto star = star4<R>();
  auto metric = pairwise_distances(star);
  auto mu = Measure<R>::make({{1, R(1) / R(2)}, {2, R(1) / R(2)}});
  auto nu = Measure<R>::make({{3, R(1)}});

  CHECK(transport_lp(metric, mu, mu).value == R(0));

  auto da = Measure<R>::make({{1, R(1)}});
  auto dc = Measure<R>::make({{3, R(1)}});
  CHECK(transport_lp(metric, da, dc).value == R(4));

  auto result = transport_lp(metric, mu, nu);
  CHECK(result.value == R(9) / R(2));
  CHECK(result.plan.max_marginal_deviation() == R(0));
  // the attained cost equals the reported value
  R cost(0);
  for (const auto& e : result.plan.entries()) cost += e.mass * metric.at(e.src, e.dst);
  CHECK(cost == result.value);
}

TEST_CASE("transport_lp matches exhaustive basis enumeration (exact)") {
  Rng rng(7);
  for (int it = 0; it < 120; ++it) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(10));
    auto t = random_tree<Rational>(rng, n);
    auto metric = pairwise_distances(t);
    auto [mu, nu] = random_measure_pair<Rational>(rng, n, 4);
    CHECK(transport_lp(metric, mu, nu).value == twatest::brute_force_transport(metric, mu, nu));
  }
}

TEST_CASE("transport_lp matches exhaustive basis enumeration (float)") {
  Rng rng(8);
  for (int it = 0; it < 60; ++it) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(10));
    auto t = random_tree<double>(rng, n);
    auto metric = pairwise_distances(t);
    auto [mu, nu] = random_measure_pair<double>(rng, n, 4);
    double lp = transport_lp(metric, mu, nu).value;
    double bf = twatest::brute_force_transport(metric, mu, nu);
    CHECK(std::abs(lp - bf) <= 1e-9 * std::max(1.0, bf));
  }
}

TEST_CASE("transport_lp rejects oversized and imbalanced inputs") {
  Rng rng(9);
  auto t = random_tree<double>(rng, 12);
  auto metric = pairwise_distances(t);
  auto wide = Measure<double>::make({{0, 0.25}, {1, 0.25}, {2, 0.25}, {3, 0.25}});
  auto narrow = Measure<double>::make({{4, 1.0}});
  try {
    transport_lp(metric, wide, narrow, 2);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_large);
  }
  // both measures pass construction individually but their totals differ by
  // more than the solver tolerates
  auto heavy = Measure<double>::make({{0, 0.5}, {1, 0.5 + 9e-13}});
  auto light = Measure<double>::make({{2, 1.0 - 9e-13}});
  try {
    transport_lp(metric, heavy, light);
    FAIL("expected infeasible marginals");
  } catch (const Error& e) {
    CHECK(e.code() == errc::infeasible_marginals);
  }
}

TEST_CASE_TEMPLATE("kr_dual on the worked shapes", R, double, Rational) {
  auto star = star4<R>();
  auto metric = pairwise_distances(star);
  auto mu = Measure<R>::make({{1, R(1) / R(2)}, {2, R(1) / R(2)}});
  auto nu = Measure<R>::make({{3, R(1)}});

  CHECK(kr_dual_value(metric, mu, mu) == R(0));
  auto da = Measure<R>::make({{1, R(1)}});
  auto dc = Measure<R>::make({{3, R(1)}});
  CHECK(kr_dual_value(metric, da, dc) == R(4));
  CHECK(kr_dual_value(metric, mu, nu) == R(9) / R(2));
}

TEST_CASE("strong duality: kr_dual equals transport_lp (exact)") {
  Rng rng(10);
  for (int it = 0; it < 50; ++it) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(11));
    auto t = random_tree<Rational>(rng, n);
    auto metric = pairwise_distances(t);
    auto [mu, nu] = random_measure_pair<Rational>(rng, n);
    CHECK(kr_dual_value(metric, mu, nu) == transport_lp(metric, mu, nu).value);
  }
}

TEST_CASE("strong duality: kr_dual equals transport_lp (float)") {
  Rng rng(12);
  for (int it = 0; it < 50; ++it) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(13));
    auto t = random_tree<double>(rng, n);
    auto metric = pairwise_distances(t);
    auto [mu, nu] = random_measure_pair<double>(rng, n);
    double lp = transport_lp(metric, mu, nu).value;
    double kr = kr_dual_value(metric, mu, nu);
    CHECK(std::abs(lp - kr) <= 1e-6 * std::max(1.0, lp));
  }
}

TEST_CASE("kr_dual enforces its support-union cap") {
  Rng rng(13);
  auto t = random_tree<double>(rng, 40);
  auto metric = pairwise_distances(t);
  std::vector<Measure<double>::Entry> wide;
  for (uint32_t i = 0; i < 34; ++i) wide.emplace_back(i, 1.0 / 34);
  auto mu = Measure<double>::make(wide);
  auto nu = Measure<double>::make({{35, 1.0}});
  try {
    kr_dual_value(metric, mu, nu);
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == errc::too_large);
  }
}
