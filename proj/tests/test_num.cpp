#include <doctest.h>

#include "twa/num.hpp"

using namespace twa;

TEST_CASE("decimal literals parse to exact rationals") {
  CHECK(parse_number<Rational>("3.7", "t") == Rational(37, 10));
  CHECK(parse_number<Rational>("0.1", "t") == Rational(1, 10));
  CHECK(parse_number<Rational>("-0.25", "t") == Rational(-1, 4));
  CHECK(parse_number<Rational>("1e-3", "t") == Rational(1, 1000));
  CHECK(parse_number<Rational>("2.5e2", "t") == Rational(250));
  CHECK(parse_number<Rational>("12E+1", "t") == Rational(120));
  CHECK(parse_number<Rational>("2/3", "t") == Rational(2, 3));
  CHECK(parse_number<Rational>("-9/6", "t") == Rational(-3, 2));
  CHECK(parse_number<Rational>("0", "t") == Rational(0));
}

TEST_CASE("double literals parse, fractions included") {
  CHECK(parse_number<double>("3.7", "t") == doctest::Approx(3.7));
  CHECK(parse_number<double>("1/4", "t") == 0.25);
  CHECK(parse_number<double>("-2e-2", "t") == doctest::Approx(-0.02));
}

TEST_CASE("malformed numbers are rejected") {
  CHECK_THROWS_AS(parse_number<Rational>("", "t"), Error);
  CHECK_THROWS_AS(parse_number<Rational>("1.2.3", "t"), Error);
  CHECK_THROWS_AS(parse_number<Rational>("abc", "t"), Error);
  CHECK_THROWS_AS(parse_number<Rational>("1e", "t"), Error);
  CHECK_THROWS_AS(parse_number<Rational>("1/0", "t"), Error);
  CHECK_THROWS_AS(parse_number<double>("nan", "t"), Error);
  CHECK_THROWS_AS(parse_number<double>("inf", "t"), Error);
  CHECK_THROWS_AS(parse_number<double>("4x", "t"), Error);
}

TEST_CASE("exact_string renders canonical fractions") {
  CHECK(exact_string(Rational(9, 2)) == "9/2");
  CHECK(exact_string(Rational(4, 2)) == "2");
  CHECK(exact_string(Rational(-1, 3)) == "-1/3");
  CHECK(exact_string(Rational(0)) == "0");
}

TEST_CASE("tolerance helpers respect the mode") {
  CHECK(gt(1.0 + 1e-6, 1.0, 1e-9));
  CHECK_FALSE(gt(1.0 + 1e-13, 1.0, 1e-12));
  CHECK(gt(Rational(1000001, 1000000), Rational(1), 1e-3));  // exact mode ignores tol
  CHECK(near(1.0, 1.0 + 5e-13, 1e-12));
  CHECK_FALSE(near(Rational(1), Rational(1000001, 1000000), 1e-3));
}
