#pragma once

#include <map>
#include <optional>
#include <string>

#include "nilcurv/attributes.hpp"

namespace nilcurv {

/// Classified families and catalogue examples. Constructors are templated on
/// the scalar; the ones whose entries involve square roots (qe_dim6,
/// three_step_dim7, conti8, example7, example10, and the dim-7 basis change)
/// need those roots to exist in the scalar type, so in exact mode they throw
/// InexactSqrt unless the radicand is a perfect square. Everything else works
/// in both modes verbatim.

/// Nilpotent bracket table on basis (f1..f6):
///   [f1,f2]=f4, [f1,f3]=f5, [f2,f4]=f6, [f3,f5]=-f6,
/// with metric f1*^2 + f2*^2 + f3*^2 + 4a^4 f6*^2 - 2a^2 f4*.f5*
/// (f4, f5 are null directions). Ricci-flat for every a != 0.
template <class S>
MetricLieAlgebra<S> make_l6_19(const S& alpha) {
  if (alpha == S(0)) throw ZeroParameter("alpha must be nonzero");
  S a2 = alpha * alpha;
  Mat<S> g = Mat<S>::identity(6);
  g(1, 1) = scalar_from_int<S>(2);
  g(2, 2) = scalar_from_int<S>(2);
  g(3, 3) = S(0);
  g(4, 4) = S(0);
  g(3, 4) = S(-2) * a2;
  g(4, 3) = S(-2) * a2;
  g(5, 5) = scalar_from_int<S>(4) * a2 * a2;
  MetricLieAlgebra<S> h(6, g);
  h.add_bracket(0, 1, 3, S(1));
  h.add_bracket(0, 2, 4, S(1));
  h.add_bracket(1, 3, 5, S(1));
  h.add_bracket(2, 4, 5, S(-1));
  return h;
}

/// Nilpotent bracket table on basis (f1..f7):
///   [f1,f2]=f5, [f1,f3]=f6, [f2,f3]=f4, [f2,f6]=-(1-r)f7,
///   [f3,f5]=r f7, [f1,f4]=-f7,
/// with metric diag(1, 1, 1, -a, ar, a(1-r), a^2). Ricci-flat for
/// 0 < r < 1, a > 0; the -a direction is the timelike one.
template <class S>
MetricLieAlgebra<S> make_dim7_147e(const S& r, const S& a) {
  if (!(S(0) < r && r < S(1))) throw ParameterOutOfRange("r must satisfy 0 < r < 1");
  if (!(S(0) < a)) throw ParameterOutOfRange("a must be positive");
  Mat<S> g = Mat<S>::identity(7);
  g(3, 3) = -a;
  g(4, 4) = a * r;
  g(5, 5) = a * (S(1) - r);
  g(6, 6) = a * a;
  MetricLieAlgebra<S> h(7, g);
  h.add_bracket(0, 1, 4, S(1));
  h.add_bracket(0, 2, 5, S(1));
  h.add_bracket(1, 2, 3, S(1));
  h.add_bracket(1, 5, 6, -(S(1) - r));
  h.add_bracket(2, 4, 6, r);
  h.add_bracket(0, 3, 6, S(-1));
  return h;
}

/// A pseudo-Euclidean algebra with a distinguished cocycle attached: the data
/// of a quasi-Einstein candidate of type p = z_metric dimension.
template <class S>
struct QeFamily {
  MetricLieAlgebra<S> g;
  CocycleData<S> omega;
  Mat<S> z_metric;
};

namespace detail {

inline void require_sign(int v, const char* what) {
  if (v != 1 && v != -1) throw ParameterOutOfRange(std::string(what) + " must be +1 or -1");
}

}  // namespace detail

/// Five-dimensional Lorentzian 2-step algebra on basis (e1, e2, u1, u2, u3),
/// metric diag(-1, 1, 1, 1, 1):
///   [u1,u2] = a e2,  [u2,u3] = s a e1,
/// with line-valued cocycle w(e2,u3) = e a, w(e1,u1) = -s e a.
/// Quasi-Einstein at lambda = 0 for every a != 0, e, s in {+1,-1}.
template <class S>
QeFamily<S> make_qe_dim5(const S& alpha, int eps, int sign) {
  if (alpha == S(0)) throw ZeroParameter("alpha must be nonzero");
  detail::require_sign(eps, "eps");
  detail::require_sign(sign, "sign");
  S e = scalar_from_int<S>(eps);
  S s = scalar_from_int<S>(sign);

  Mat<S> g = Mat<S>::identity(5);
  g(0, 0) = S(-1);
  QeFamily<S> out{MetricLieAlgebra<S>(5, g), {}, Mat<S>::identity(1)};
  out.g.add_bracket(2, 3, 1, alpha);
  out.g.add_bracket(3, 4, 0, s * alpha);

  Mat<S> w(5, 5);
  w(1, 4) = e * alpha;
  w(4, 1) = -(e * alpha);
  w(0, 2) = -(s * e * alpha);
  w(2, 0) = s * e * alpha;
  out.omega.g_dim = 5;
  out.omega.s_ops.push_back(-(inverse(out.g.metric) * w));
  return out;
}

/// Six-dimensional Lorentzian 2-step algebra on basis (e1, e2, e3, u1, u2, u3),
/// metric diag(-1, 1, 1, 1, 1, 1), with a = sqrt(a2^2 + a3^2):
///   [u1,u2] = a2 e2,  [u1,u3] = a3 e3,  [u2,u3] = e a e1,
/// and cocycle w(e2,u3) = -s e a2, w(e3,u2) = s e a3, w(e1,u1) = s a.
/// Quasi-Einstein at lambda = 0 for a2, a3 != 0.
template <class S>
QeFamily<S> make_qe_dim6(const S& alpha2, const S& alpha3, int eps, int sign) {
  if (alpha2 == S(0) || alpha3 == S(0)) throw ZeroParameter("alpha2, alpha3 must be nonzero");
  detail::require_sign(eps, "eps");
  detail::require_sign(sign, "sign");
  S e = scalar_from_int<S>(eps);
  S s = scalar_from_int<S>(sign);
  S rad = alpha2 * alpha2 + alpha3 * alpha3;
  S alpha = exact_sqrt(rad);

  Mat<S> g = Mat<S>::identity(6);
  g(0, 0) = S(-1);
  QeFamily<S> out{MetricLieAlgebra<S>(6, g), {}, Mat<S>::identity(1)};
  out.g.add_bracket(3, 4, 1, alpha2);
  out.g.add_bracket(3, 5, 2, alpha3);
  out.g.add_bracket(4, 5, 0, e * alpha);

  Mat<S> w(6, 6);
  auto put = [&](int a, int b, S v) {
    w(a, b) = v;
    w(b, a) = -v;
  };
  put(1, 5, -(s * e * alpha2));
  put(2, 4, s * e * alpha3);
  put(0, 3, s * alpha);
  out.omega.g_dim = 6;
  out.omega.s_ops.push_back(-(inverse(out.g.metric) * w));
  return out;
}

enum class Dim6Variant { a, b };

/// Six-dimensional 3-step algebra on orthonormal basis (x, e1, e2, u1, u2, u3)
/// with <e1,e1> = -1:
///   [u1,u2] = a e2,  [u2,u3] = s a e1,
///   variant a: [e2,u3] =  a x, [e1,u1] = -s a x;
///   variant b: [e2,u3] = -a x, [e1,u1] =  s a x.
/// Ricci-flat; the center is span(x). Variant b equals variant a after the
/// substitution u3 -> -u3.
template <class S>
MetricLieAlgebra<S> make_three_step_dim6(const S& alpha, Dim6Variant variant, int sign = 1) {
  if (alpha == S(0)) throw ZeroParameter("alpha must be nonzero");
  detail::require_sign(sign, "sign");
  S s = scalar_from_int<S>(sign);
  S v = variant == Dim6Variant::a ? S(1) : S(-1);

  Mat<S> g = Mat<S>::identity(6);
  g(1, 1) = S(-1);
  MetricLieAlgebra<S> h(6, g);
  h.add_bracket(3, 4, 2, alpha);
  h.add_bracket(4, 5, 1, s * alpha);
  h.add_bracket(2, 5, 0, v * alpha);
  h.add_bracket(1, 3, 0, -(s * v * alpha));
  return h;
}

/// Seven-dimensional 3-step algebra on orthonormal basis
/// (x, e1, e2, e3, u1, u2, u3) with <e1,e1> = -1 and a = sqrt(a2^2 + a3^2):
///   [u1,u2] = a2 e2,  [u1,u3] = a3 e3,  [u2,u3] = e a e1,
///   [e2,u3] = -s e a2 x,  [e3,u2] = s e a3 x,  [e1,u1] = s a x.
/// Ricci-flat; the center is span(x).
template <class S>
MetricLieAlgebra<S> make_three_step_dim7(const S& alpha2, const S& alpha3, int eps, int sign) {
  if (alpha2 == S(0) || alpha3 == S(0)) throw ZeroParameter("alpha2, alpha3 must be nonzero");
  detail::require_sign(eps, "eps");
  detail::require_sign(sign, "sign");
  S e = scalar_from_int<S>(eps);
  S s = scalar_from_int<S>(sign);
  S rad = alpha2 * alpha2 + alpha3 * alpha3;
  S alpha = exact_sqrt(rad);

  Mat<S> g = Mat<S>::identity(7);
  g(1, 1) = S(-1);
  MetricLieAlgebra<S> h(7, g);
  h.add_bracket(4, 5, 2, alpha2);
  h.add_bracket(4, 6, 3, alpha3);
  h.add_bracket(5, 6, 1, e * alpha);
  h.add_bracket(2, 6, 0, -(s * e * alpha2));
  h.add_bracket(3, 5, 0, s * e * alpha3);
  h.add_bracket(1, 4, 0, s * alpha);
  return h;
}

/// Basis change taking make_three_step_dim6(alpha, a, sign) to the
/// make_l6_19(alpha) presentation: columns are
///   f1 = u2, f2 = u3 + u1, f3 = u3 - u1,
///   f4 = s a e1 - a e2, f5 = s a e1 + a e2, f6 = 2 a^2 x.
template <class S>
Mat<S> dim6_to_l6_19_transform(const S& alpha, int sign = 1) {
  if (alpha == S(0)) throw ZeroParameter("alpha must be nonzero");
  detail::require_sign(sign, "sign");
  S s = scalar_from_int<S>(sign);
  Mat<S> t(6, 6);
  t(4, 0) = S(1);
  t(5, 1) = S(1);
  t(3, 1) = S(1);
  t(5, 2) = S(1);
  t(3, 2) = S(-1);
  t(1, 3) = s * alpha;
  t(2, 3) = -alpha;
  t(1, 4) = s * alpha;
  t(2, 4) = alpha;
  t(0, 5) = scalar_from_int<S>(2) * alpha * alpha;
  return t;
}

/// Basis change taking make_three_step_dim7(a2, a3, eps, sign) to
/// make_dim7_147e(r, a) with r = a2^2 / (a2^2 + a3^2), a = a2^2 + a3^2:
///   f1 = u1, f2 = u2, f3 = u3, f4 = e a e1, f5 = a2 e2, f6 = a3 e3,
///   f7 = s e a^2 x  (here a inside f4 is sqrt(a2^2 + a3^2)).
template <class S>
Mat<S> dim7_to_147e_transform(const S& alpha2, const S& alpha3, int eps, int sign) {
  if (alpha2 == S(0) || alpha3 == S(0)) throw ZeroParameter("alpha2, alpha3 must be nonzero");
  detail::require_sign(eps, "eps");
  detail::require_sign(sign, "sign");
  S e = scalar_from_int<S>(eps);
  S s = scalar_from_int<S>(sign);
  S sq = alpha2 * alpha2 + alpha3 * alpha3;
  S alpha = exact_sqrt(sq);
  Mat<S> t(7, 7);
  t(4, 0) = S(1);
  t(5, 1) = S(1);
  t(6, 2) = S(1);
  t(1, 3) = e * alpha;
  t(2, 4) = alpha2;
  t(3, 5) = alpha3;
  t(0, 6) = s * e * sq;
  return t;
}

/// Eight-dimensional 5-step Einstein algebra with nonzero constant, on an
/// orthonormal basis with <e6,e6> = -1. Entries involve square roots, so this
/// is float-only.
inline MetricLieAlgebra<double> make_conti8() {
  Mat<double> g = Mat<double>::identity(8);
  g(5, 5) = -1.0;
  MetricLieAlgebra<double> h(8, g);
  h.add_bracket(0, 1, 2, -4.0 * std::sqrt(3.0));
  h.add_bracket(0, 2, 3, std::sqrt(2.5));
  h.add_bracket(0, 3, 7, -2.0 * std::sqrt(3.0));
  h.add_bracket(0, 4, 5, 3.0 * std::sqrt(3.5));
  h.add_bracket(0, 5, 6, -4.0 * std::sqrt(2.0));
  h.add_bracket(1, 2, 4, -std::sqrt(2.5));
  h.add_bracket(1, 3, 5, -3.0 * std::sqrt(3.5));
  h.add_bracket(1, 4, 6, -2.0 * std::sqrt(3.0));
  h.add_bracket(1, 5, 7, -4.0 * std::sqrt(2.0));
  h.add_bracket(2, 3, 6, -std::sqrt(21.0));
  h.add_bracket(2, 4, 7, -std::sqrt(21.0));
  return h;
}

/// Seven-dimensional Ricci-flat 3-step algebra on a basis (e1..e7) with
/// <e1,e1> = -1, others +1; its center is span{e7, e5 - e6} (dimension 2).
/// Float-only (sqrt(2) entries).
inline MetricLieAlgebra<double> make_example7() {
  Mat<double> g = Mat<double>::identity(7);
  g(0, 0) = -1.0;
  MetricLieAlgebra<double> h(7, g);
  const double r2 = std::sqrt(2.0);
  h.add_bracket(0, 2, 6, r2);
  h.add_bracket(1, 3, 6, r2);
  h.add_bracket(3, 4, 0, -1.0);
  h.add_bracket(3, 5, 0, -1.0);
  h.add_bracket(2, 4, 1, -1.0);
  h.add_bracket(2, 5, 1, -1.0);
  return h;
}

/// Ten-dimensional Ricci-flat 3-step algebra with four-dimensional center
/// span{e7..e10}, on a basis with <e5,e5> = -1; q = sqrt(p^2 + r^2) appears
/// in the brackets, so exact mode needs p^2 + r^2 to be a perfect square.
template <class S>
MetricLieAlgebra<S> make_example10(const S& p, const S& r) {
  if (p == S(0) || r == S(0)) throw ZeroParameter("p, r must be nonzero");
  S rad = p * p + r * r;
  S q = exact_sqrt(rad);
  Mat<S> g = Mat<S>::identity(10);
  g(4, 4) = S(-1);
  MetricLieAlgebra<S> h(10, g);
  h.add_bracket(0, 2, 4, -q);
  h.add_bracket(0, 3, 5, -q);
  h.add_bracket(1, 3, 4, -q);
  h.add_bracket(1, 2, 5, -q);
  h.add_bracket(0, 4, 6, -p);
  h.add_bracket(1, 4, 7, -p);
  h.add_bracket(2, 4, 8, -r);
  h.add_bracket(3, 4, 9, -r);
  h.add_bracket(0, 5, 7, -p);
  h.add_bracket(1, 5, 6, -p);
  h.add_bracket(2, 5, 9, -r);
  h.add_bracket(3, 5, 8, -r);
  return h;
}

enum class FamilyName {
  l6_19,
  dim7_147e,
  qe_dim5,
  qe_dim6,
  three_step_dim6_a,
  three_step_dim6_b,
  three_step_dim7,
  conti8,
  example7,
  example10,
};

inline const std::map<std::string, FamilyName>& family_names() {
  static const std::map<std::string, FamilyName> names = {
      {"l6_19", FamilyName::l6_19},
      {"dim7_147e", FamilyName::dim7_147e},
      {"qe_dim5", FamilyName::qe_dim5},
      {"qe_dim6", FamilyName::qe_dim6},
      {"three_step_dim6_a", FamilyName::three_step_dim6_a},
      {"three_step_dim6_b", FamilyName::three_step_dim6_b},
      {"three_step_dim7", FamilyName::three_step_dim7},
      {"conti8", FamilyName::conti8},
      {"example7", FamilyName::example7},
      {"example10", FamilyName::example10},
  };
  return names;
}

inline FamilyName family_from_string(const std::string& s) {
  auto it = family_names().find(s);
  if (it == family_names().end()) throw ValidationError("unknown family: " + s);
  return it->second;
}

inline std::string family_to_string(FamilyName f) {
  for (const auto& [k, v] : family_names())
    if (v == f) return k;
  return "?";
}

/// Runtime family request: a name plus named numeric parameters. Sign-valued
/// parameters (eps, sign) must be exactly +1 or -1.
struct FamilySpec {
  FamilyName name;
  std::map<std::string, double> params;
};

/// Float-mode instantiation of a family, with its cocycle when it has one.
struct FamilyOutput {
  MetricLieAlgebra<double> algebra;
  std::optional<CocycleData<double>> omega;
  std::optional<Mat<double>> z_metric;
};

inline FamilyOutput make_family(const FamilySpec& spec) {
  std::map<std::string, double> p = spec.params;
  auto take = [&](const std::string& key, double fallback) {
    auto it = p.find(key);
    if (it == p.end()) return fallback;
    double v = it->second;
    p.erase(it);
    return v;
  };
  auto take_sign = [&](const std::string& key) {
    double v = take(key, 1.0);
    if (v != 1.0 && v != -1.0) throw ParameterOutOfRange(key + " must be +1 or -1");
    return static_cast<int>(v);
  };
  auto done = [&]() {
    if (!p.empty()) throw ValidationError("unknown parameter: " + p.begin()->first);
  };

  switch (spec.name) {
    case FamilyName::l6_19: {
      double alpha = take("alpha", 1.0);
      done();
      return {make_l6_19(alpha), std::nullopt, std::nullopt};
    }
    case FamilyName::dim7_147e: {
      double r = take("r", 0.5);
      double a = take("a", 1.0);
      done();
      return {make_dim7_147e(r, a), std::nullopt, std::nullopt};
    }
    case FamilyName::qe_dim5: {
      double alpha = take("alpha", 1.0);
      int eps = take_sign("eps");
      int sign = take_sign("sign");
      done();
      auto fam = make_qe_dim5(alpha, eps, sign);
      return {std::move(fam.g), std::move(fam.omega), std::move(fam.z_metric)};
    }
    case FamilyName::qe_dim6: {
      double a2 = take("alpha2", 1.0);
      double a3 = take("alpha3", 1.0);
      int eps = take_sign("eps");
      int sign = take_sign("sign");
      done();
      auto fam = make_qe_dim6(a2, a3, eps, sign);
      return {std::move(fam.g), std::move(fam.omega), std::move(fam.z_metric)};
    }
    case FamilyName::three_step_dim6_a:
    case FamilyName::three_step_dim6_b: {
      double alpha = take("alpha", 1.0);
      int sign = take_sign("sign");
      done();
      Dim6Variant v =
          spec.name == FamilyName::three_step_dim6_a ? Dim6Variant::a : Dim6Variant::b;
      return {make_three_step_dim6(alpha, v, sign), std::nullopt, std::nullopt};
    }
    case FamilyName::three_step_dim7: {
      double a2 = take("alpha2", 1.0);
      double a3 = take("alpha3", 1.0);
      int eps = take_sign("eps");
      int sign = take_sign("sign");
      done();
      return {make_three_step_dim7(a2, a3, eps, sign), std::nullopt, std::nullopt};
    }
    case FamilyName::conti8:
      done();
      return {make_conti8(), std::nullopt, std::nullopt};
    case FamilyName::example7:
      done();
      return {make_example7(), std::nullopt, std::nullopt};
    case FamilyName::example10: {
      double pp = take("p", 1.0);
      double rr = take("r", 1.0);
      done();
      return {make_example10(pp, rr), std::nullopt, std::nullopt};
    }
  }
  throw ValidationError("unknown family");
}

} // namespace nilcurv
