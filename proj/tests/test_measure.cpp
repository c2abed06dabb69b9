#include <doctest.h>

#include <vector>

#include "twa/gen.hpp"
#include "twa/measure.hpp"
#include "twa/rng.hpp"

using namespace twa;

TEST_CASE_TEMPLATE("make: dirac, uniform, duplicates, zero drop", R, double, Rational) {
  auto dirac = Measure<R>::make({{4, R(1)}});
  CHECK(dirac.support_size() == 1);
  CHECK(dirac.mass_at(4) == R(1));
  CHECK(dirac.mass_at(0) == R(0));

  auto uniform = Measure<R>::make({{1, R(1) / R(2)}, {0, R(1) / R(2)}});
  CHECK(uniform.support_size() == 2);
  CHECK(uniform.entries()[0].first == 0);  // sorted by id

  auto dup = Measure<R>::make({{2, R(1) / R(4)}, {2, R(1) / R(4)}, {3, R(1) / R(2)}});
  CHECK(dup.support_size() == 2);
  CHECK(dup.mass_at(2) == R(1) / R(2));

  auto zeros = Measure<R>::make({{0, R(0)}, {1, R(1)}, {2, R(0)}});
  CHECK(zeros.support_size() == 1);
}

TEST_CASE("make rejects signed and unnormalized mass") {
  try {
    Measure<double>::make({{0, -0.1}, {1, 1.1}});
    FAIL("expected negative mass error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::negative_mass);
  }
  CHECK_THROWS_AS(Measure<double>::make({{0, 0.9}}), Error);
  CHECK_THROWS_AS(Measure<double>::make({}), Error);

  // float tolerance: 1e-13 off is fine, 1e-9 is not
  CHECK_NOTHROW(Measure<double>::make({{0, 0.5}, {1, 0.5 + 1e-13}}));
  CHECK_THROWS_AS(Measure<double>::make({{0, 0.5}, {1, 0.5 + 1e-9}}), Error);

  // rational mode: the sum must be exactly 1
  CHECK_NOTHROW(Measure<Rational>::make({{0, Rational(1, 3)}, {1, Rational(2, 3)}}));
  CHECK_THROWS_AS(Measure<Rational>::make({{0, Rational(1, 3)}, {1, Rational(2, 3) + Rational(1, 1000000000)}}),
                  Error);
}

TEST_CASE_TEMPLATE("pushforward: collapse, relabel, two-to-one", R, double, Rational) {
  auto m = Measure<R>::make({{0, R(1) / R(2)}, {1, R(1) / R(2)}});

  std::vector<uint32_t> constant{7, 7};
  auto collapsed = pushforward<R>(constant, m);
  CHECK(collapsed.support_size() == 1);
  CHECK(collapsed.mass_at(7) == R(1));

  std::vector<uint32_t> relabel{5, 3};
  auto moved = pushforward<R>(relabel, m);
  CHECK(moved.mass_at(5) == R(1) / R(2));
  CHECK(moved.mass_at(3) == R(1) / R(2));

  std::vector<uint32_t> glue{2, 2};
  CHECK(pushforward<R>(glue, m).mass_at(2) == R(1));
}

TEST_CASE("pushforward requires a total map") {
  auto m = Measure<double>::make({{3, 1.0}});
  std::vector<uint32_t> too_short{0, 0};
  try {
    pushforward<double>(too_short, m);
    FAIL("expected unmapped point");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unmapped_point);
  }
  std::vector<uint32_t> hole{0, 0, 0, k_unmapped};
  CHECK_THROWS_AS(pushforward<double>(hole, m), Error);
}

TEST_CASE("pushforward preserves mass and composes") {
  Rng rng(3);
  for (int it = 0; it < 40; ++it) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(12));
    auto m = random_measure<Rational>(rng, n);
    std::vector<uint32_t> f(n), g(2 * n);
    for (auto& x : f) x = static_cast<uint32_t>(rng.next_below(2 * n));
    for (auto& x : g) x = static_cast<uint32_t>(rng.next_below(5));
    auto fm = pushforward<Rational>(f, m);
    CHECK(fm.total() == Rational(1));

    std::vector<uint32_t> gf(n);
    for (uint32_t i = 0; i < n; ++i) gf[i] = g[f[i]];
    CHECK(pushforward<Rational>(gf, m) == pushforward<Rational>(g, fm));
  }
  // float mode: mass drift stays at rounding scale
  for (int it = 0; it < 20; ++it) {
    uint32_t n = 2 + static_cast<uint32_t>(rng.next_below(12));
    auto m = random_measure<double>(rng, n);
    std::vector<uint32_t> f(n, 0);
    for (auto& x : f) x = static_cast<uint32_t>(rng.next_below(3));
    CHECK(std::abs(pushforward<double>(f, m).total() - m.total()) <= 1e-15 * static_cast<double>(n));
  }
}
