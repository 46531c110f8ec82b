#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilcurv/liealg.hpp"

namespace nilcurv {

template <class S>
std::vector<S> unit_vector(int n, int i) {
  std::vector<S> v(n, S(0));
  v[i] = S(1);
  return v;
}

/// Levi-Civita connection in the fixed basis: l[a] is the matrix of
/// v -> L_{e_a} v. Solved once from
///   2 <L_u v, w> = <[u,v],w> + <[w,u],v> + <[w,v],u>.
template <class S>
struct LeviCivitaData {
  std::vector<Mat<S>> l;
  Mat<S> g_inv;
};

template <class S>
LeviCivitaData<S> levi_civita(const MetricLieAlgebra<S>& a) {
  const int n = a.n;
  LeviCivitaData<S> lc;
  lc.g_inv = inverse(a.metric);
  lc.l.reserve(n);
  const S two = scalar_from_int<S>(2);
  for (int i = 0; i < n; ++i) {
    auto ei = unit_vector<S>(n, i);
    Mat<S> li(n, n);
    for (int b = 0; b < n; ++b) {
      auto eb = unit_vector<S>(n, b);
      auto g_uv = mat_vec(a.metric, a.bracket_basis(i, b));
      std::vector<S> rhs(n, S(0));
      for (int w = 0; w < n; ++w)
        rhs[w] = g_uv[w] + dot_g(a.metric, a.bracket_basis(w, i), eb) +
                 dot_g(a.metric, a.bracket_basis(w, b), ei);
      auto col = mat_vec(lc.g_inv, rhs);
      for (int k = 0; k < n; ++k) li(k, b) = col[k] / two;
    }
    lc.l.push_back(std::move(li));
  }
  return lc;
}

template <class S>
Mat<S> connection_of(const LeviCivitaData<S>& lc, const std::vector<S>& u) {
  const int n = static_cast<int>(u.size());
  Mat<S> m(n, n);
  for (int a = 0; a < n; ++a) {
    if (u[a] == S(0)) continue;
    m = m + u[a] * lc.l[a];
  }
  return m;
}

/// Curvature operator K(u, v) = L_{[u,v]} - [L_u, L_v].
template <class S>
Mat<S> curvature_op(const MetricLieAlgebra<S>& a, const LeviCivitaData<S>& lc,
                    const std::vector<S>& u, const std::vector<S>& v) {
  Mat<S> lu = connection_of(lc, u);
  Mat<S> lv = connection_of(lc, v);
  Mat<S> lw = connection_of(lc, a.bracket(u, v));
  return lw - (lu * lv - lv * lu);
}

/// Largest curvature entry over basis pairs; zero iff the metric is flat.
template <class S>
double flatness_residual(const MetricLieAlgebra<S>& a) {
  auto lc = levi_civita(a);
  double worst = 0.0;
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j)
      worst = std::max(worst,
                       curvature_op(a, lc, unit_vector<S>(a.n, i), unit_vector<S>(a.n, j)).norm_inf());
  return worst;
}

template <class S>
struct CurvatureReport {
  Mat<S> ric;                      ///< Ricci bilinear form, ric(e_i, e_j)
  Mat<S> ric_op;                   ///< Ricci operator g^{-1} ric
  S scalar = S(0);                 ///< trace of the Ricci operator
  S lambda_star = S(0);            ///< scalar / dim, the best Einstein constant
  double einstein_residual = 0.0;  ///< max |ric_op - lambda_star I|
};

template <class S>
CurvatureReport<S> finish_report(const MetricLieAlgebra<S>& a, Mat<S> ric, const Mat<S>& g_inv) {
  CurvatureReport<S> rep;
  rep.ric_op = g_inv * ric;
  rep.ric = std::move(ric);
  rep.scalar = rep.ric_op.trace();
  rep.lambda_star = a.n > 0 ? rep.scalar / scalar_from_int<S>(a.n) : S(0);
  rep.einstein_residual = (rep.ric_op - rep.lambda_star * Mat<S>::identity(a.n)).norm_inf();
  return rep;
}

/// Ricci tensor by its definition, ric(u, v) = tr(w -> K(u, w) v). Works for
/// any metric Lie algebra; cost is n^5.
template <class S>
CurvatureReport<S> ricci_general(const MetricLieAlgebra<S>& a) {
  const int n = a.n;
  auto lc = levi_civita(a);
  Mat<S> ric(n, n);
  for (int i = 0; i < n; ++i) {
    auto ei = unit_vector<S>(n, i);
    for (int w = 0; w < n; ++w) {
      Mat<S> k = curvature_op(a, lc, ei, unit_vector<S>(n, w));
      for (int j = 0; j < n; ++j) ric(i, j) += k(w, j);
    }
  }
  return finish_report(a, std::move(ric), lc.g_inv);
}

template <class S>
struct NilpotentRicci {
  CurvatureReport<S> report;
  Mat<S> j1;  ///< operator with <j1 u, v> = tr(ad_u ad_v*)
  Mat<S> j2;  ///< operator with <j2 u, v> = -tr(J_u J_v)
};

/// Ricci tensor from the trace identities valid on nilpotent algebras,
///   ric(u, v) = -1/2 tr(ad_u ad_v*) - 1/4 tr(J_u J_v),  J_u(v) = ad_v*(u),
/// together with the operators j1, j2 satisfying Ric = -1/2 j1 + 1/4 j2.
template <class S>
NilpotentRicci<S> ricci_nilpotent(const MetricLieAlgebra<S>& a) {
  const int n = a.n;
  lower_central_series(a);  // throws NotNilpotent when the trace formulas do not apply
  Mat<S> g_inv = inverse(a.metric);
  std::vector<Mat<S>> ads, ad_stars;
  ads.reserve(n);
  ad_stars.reserve(n);
  for (int i = 0; i < n; ++i) {
    ads.push_back(a.ad(i));
    ad_stars.push_back(metric_adjoint(a.metric, g_inv, ads.back()));
  }
  std::vector<Mat<S>> jmaps;
  jmaps.reserve(n);
  for (int i = 0; i < n; ++i) {
    Mat<S> j(n, n);
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k) j(k, b) = ad_stars[b](k, i);
    jmaps.push_back(std::move(j));
  }
  Mat<S> t1(n, n), t2(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      S v1 = (ads[i] * ad_stars[j]).trace();
      S v2 = -(jmaps[i] * jmaps[j]).trace();
      t1(i, j) = v1;
      t1(j, i) = v1;
      t2(i, j) = v2;
      t2(j, i) = v2;
    }
  S half = S(1) / scalar_from_int<S>(2);
  S quarter = S(1) / scalar_from_int<S>(4);
  Mat<S> ric = -(half * t1) + quarter * t2;
  NilpotentRicci<S> out;
  out.report = finish_report(a, std::move(ric), g_inv);
  out.j1 = g_inv * t1;
  out.j2 = g_inv * t2;
  return out;
}

/// j1 recomputed from the structure endomorphisms of a derived-ideal basis
/// (columns b_i with Gram entries <b_i, b_j>):
///   j1 = -sum_{i,j} <b_i, b_j> J_i J_j.
/// Independent of the trace definition; the two must agree.
template <class S>
Mat<S> j1_product_form(const MetricLieAlgebra<S>& a, const Mat<S>& derived_cols) {
  auto js = structure_endos(a, derived_cols);
  Mat<S> gr = gram(a.metric, derived_cols);
  const int k = derived_cols.cols();
  Mat<S> out(a.n, a.n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (gr(i, j) == S(0)) continue;
      out = out + (-gr(i, j)) * (js[i] * js[j]);
    }
  return out;
}

/// j2 recomputed from the same structure endomorphisms:
///   j2 u = -sum_{i,j} <b_i, u> tr(J_i J_j) b_j.
template <class S>
Mat<S> j2_product_form(const MetricLieAlgebra<S>& a, const Mat<S>& derived_cols) {
  auto js = structure_endos(a, derived_cols);
  const int k = derived_cols.cols();
  Mat<S> gb = a.metric * derived_cols;  // gb(c, i) = <b_i, e_c>
  Mat<S> tr_jj(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      S t = (js[i] * js[j]).trace();
      tr_jj(i, j) = t;
      tr_jj(j, i) = t;
    }
  Mat<S> out(a.n, a.n);
  for (int c = 0; c < a.n; ++c)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        S f = -(gb(c, i) * tr_jj(i, j));
        if (f == S(0)) continue;
        for (int r = 0; r < a.n; ++r) out(r, c) += f * derived_cols(r, j);
      }
  return out;
}

enum class EinsteinMode { einstein, ricci_flat, soliton };

template <class S>
struct EinsteinVerdict {
  EinsteinMode mode = EinsteinMode::einstein;
  bool passed = false;
  double residual = 0.0;
  S lambda = S(0);
  double derivation_residual = 0.0;  ///< soliton mode only
};

/// Checks Ric = lambda Id (mode einstein, lambda = trace average), Ric = 0
/// (mode ricci_flat), or Ric = lambda Id + D for the supplied candidate
/// derivation D (mode soliton, lambda minimizing the residual). The soliton
/// derivation property is reported, not enforced.
template <class S>
EinsteinVerdict<S> einstein_check(const MetricLieAlgebra<S>& a, EinsteinMode mode,
                                  const std::optional<Mat<S>>& soliton_d = std::nullopt,
                                  double tol = kDefaultTol) {
  CurvatureReport<S> rep = ricci_general(a);
  EinsteinVerdict<S> v;
  v.mode = mode;
  double scale = std::max(1.0, rep.ric_op.norm_inf());
  switch (mode) {
    case EinsteinMode::einstein:
      v.lambda = rep.lambda_star;
      v.residual = rep.einstein_residual;
      break;
    case EinsteinMode::ricci_flat:
      v.lambda = S(0);
      v.residual = rep.ric_op.norm_inf();
      break;
    case EinsteinMode::soliton: {
      if (!soliton_d) throw ValidationError("soliton mode needs a candidate derivation");
      Mat<S> diff = rep.ric_op - *soliton_d;
      v.lambda = a.n > 0 ? diff.trace() / scalar_from_int<S>(a.n) : S(0);
      v.residual = (diff - v.lambda * Mat<S>::identity(a.n)).norm_inf();
      v.derivation_residual = derivation_residual(a, *soliton_d);
      break;
    }
  }
  v.passed = v.residual <= tol * scale;
  return v;
}

} // namespace nilcurv
