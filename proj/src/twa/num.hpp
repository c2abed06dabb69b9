#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <type_traits>

#include "error.hpp"

namespace twa {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class R>
inline constexpr bool is_exact_v = !std::is_floating_point_v<R>;

// Float-mode tolerances. Exact (rational) mode always compares exactly.
namespace tolerance {
inline constexpr double measure_sum = 1e-12;       // |sum of masses - 1| at construction
inline constexpr double sweep_compare = 1e-12;     // subtree-mass comparisons in the coupling sweeps
inline constexpr double mass_flush = 1e-15;        // provenance dust flushed after a split
inline constexpr double coupling_marginal = 1e-10; // coupling row/column sums vs marginals
inline constexpr double coupling_total = 1e-9;     // total coupling mass audit
inline constexpr double metric_triangle = 1e-12;   // triangle-inequality slack on loaded matrices
inline constexpr double non_contraction = 1e-9;    // per-component embedding non-contraction slack
inline constexpr double audit_slack = 1e-9;        // distortion sandwich slack
}  // namespace tolerance

// a > b, with slack `tol` in float mode.
template <class R>
bool gt(const R& a, const R& b, double tol) {
  if constexpr (is_exact_v<R>) {
    (void)tol;
    return a > b;
  } else {
    return a > b + tol;
  }
}

template <class R>
bool lt(const R& a, const R& b, double tol) {
  return gt(b, a, tol);
}

template <class R>
bool near(const R& a, const R& b, double tol) {
  if constexpr (is_exact_v<R>) {
    (void)tol;
    return a == b;
  } else {
    return std::abs(a - b) <= tol;
  }
}

template <class R>
R abs_value(const R& a) {
  if constexpr (is_exact_v<R>) {
    return a < 0 ? R(-a) : a;
  } else {
    return std::abs(a);
  }
}

template <class R>
double to_double(const R& a) {
  if constexpr (is_exact_v<R>) {
    return a.template convert_to<double>();
  } else {
    return a;
  }
}

// Canonical "p" / "p/q" rendering of an exact value.
inline std::string exact_string(const Rational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace detail {

// Decimal or scientific literal -> exact rational (e.g. "3.7" -> 37/10).
inline Rational rational_from_decimal(std::string_view s, std::string_view what) {
  size_t i = 0;
  auto bad = [&]() -> Rational {
    fail(errc::parse_error, "invalid number '" + std::string(s) + "' in " + std::string(what));
  };
  if (s.empty()) return bad();
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  BigInt mantissa = 0;
  size_t digits = 0, frac_digits = 0;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) return bad();
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      ++digits;
      if (seen_dot) ++frac_digits;
    } else {
      break;
    }
  }
  if (digits == 0) return bad();
  long long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      eneg = s[i] == '-';
      ++i;
    }
    if (i == s.size()) return bad();
    long long e = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') return bad();
      e = e * 10 + (s[i] - '0');
      if (e > 100000) return bad();
    }
    exp10 = eneg ? -e : e;
  }
  if (i != s.size()) return bad();
  long long shift = exp10 - static_cast<long long>(frac_digits);
  Rational value(mantissa, 1);
  if (shift > 0) {
    value *= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(shift)), 1);
  } else if (shift < 0) {
    value /= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-shift)), 1);
  }
  return neg ? Rational(-value) : value;
}

}  // namespace detail

// Parses a numeric literal. Accepts decimal/scientific notation and the
// "p/q" form produced by exact_string().
template <class R>
R parse_number(std::string_view s, std::string_view what) {
  size_t slash = s.find('/');
  if constexpr (is_exact_v<R>) {
    if (slash != std::string_view::npos) {
      Rational num = detail::rational_from_decimal(s.substr(0, slash), what);
      Rational den = detail::rational_from_decimal(s.substr(slash + 1), what);
      if (den == 0) fail(errc::parse_error, "zero denominator in " + std::string(what));
      return num / den;
    }
    return detail::rational_from_decimal(s, what);
  } else {
    if (slash != std::string_view::npos) {
      double num = parse_number<double>(s.substr(0, slash), what);
      double den = parse_number<double>(s.substr(slash + 1), what);
      if (den == 0) fail(errc::parse_error, "zero denominator in " + std::string(what));
      return num / den;
    }
    std::string buf(s);
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || buf.empty() || !std::isfinite(v)) {
      fail(errc::parse_error, "invalid number '" + buf + "' in " + std::string(what));
    }
    return v;
  }
}

}  // namespace twa
