#pragma once

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>

#include <gmpxx.h>

#include "nilcurv/errors.hpp"

namespace nilcurv {

/// Exact scalar type. All arithmetic on it is exact; comparisons against
/// tolerances never apply in this mode.
using Rational = mpq_class;

template <class S>
inline constexpr bool is_exact_v = false;
template <>
inline constexpr bool is_exact_v<Rational> = true;

/// Default relative tolerance for float-mode comparisons.
inline constexpr double kDefaultTol = 1e-9;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline double abs_value(double x) { return std::fabs(x); }
inline Rational abs_value(const Rational& x) { return abs(x); }

template <class S>
S scalar_from_int(long v) {
  return S(static_cast<double>(v));
}
template <>
inline Rational scalar_from_int<Rational>(long v) {
  return Rational(v);
}

/// Square root usable in both scalar modes. For doubles this is std::sqrt of a
/// nonnegative argument. For rationals the result exists only when numerator
/// and denominator are perfect squares; anything else throws InexactSqrt so
/// exact computations never silently lose exactness.
inline std::optional<double> try_exact_sqrt(double x) {
  if (x < 0.0) return std::nullopt;
  return std::sqrt(x);
}

inline std::optional<Rational> try_exact_sqrt(const Rational& x) {
  if (sgn(x) < 0) return std::nullopt;
  Rational c = x;
  c.canonicalize();
  mpz_class num = c.get_num();
  mpz_class den = c.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  return Rational(rn, rd);
}

template <class S>
S exact_sqrt(const S& x) {
  auto r = try_exact_sqrt(x);
  if (!r) throw InexactSqrt("square root is not representable in the current scalar mode");
  return *r;
}

/// Parses "p/q" or "p" with optional leading sign; q must be positive.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty rational literal");
  std::string t = text;
  auto slash = t.find('/');
  std::string num = (slash == std::string::npos) ? t : t.substr(0, slash);
  std::string den = (slash == std::string::npos) ? "1" : t.substr(slash + 1);
  auto check_int = [&](const std::string& s) {
    if (s.empty()) throw ParseError("bad rational literal: " + text);
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw ParseError("bad rational literal: " + text);
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') throw ParseError("bad rational literal: " + text);
  };
  check_int(num);
  check_int(den);
  mpz_class n(num), d(den);
  if (d <= 0) throw ParseError("rational denominator must be positive: " + text);
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Canonical text form: "p" for integers, otherwise "p/q" in lowest terms.
inline std::string format_scalar(const Rational& x) {
  Rational c = x;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Shortest round-trip decimal form.
inline std::string format_scalar(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

} // namespace nilcurv
