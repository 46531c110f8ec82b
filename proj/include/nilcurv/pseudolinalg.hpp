#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "nilcurv/matrix.hpp"
#include "nilcurv/numeric.hpp"

namespace nilcurv {

template <class S>
S dot_g(const Mat<S>& g, const std::vector<S>& u, const std::vector<S>& v) {
  S r(0);
  for (int i = 0; i < g.rows(); ++i) {
    if (u[i] == S(0)) continue;
    for (int j = 0; j < g.cols(); ++j) r += u[i] * g(i, j) * v[j];
  }
  return r;
}

/// Gram matrix of the given column vectors: cols^T g cols.
template <class S>
Mat<S> gram(const Mat<S>& g, const Mat<S>& cols) {
  return cols.transposed() * g * cols;
}

/// Metric adjoint F* with <F u, v> = <u, F* v>, i.e. F* = g^{-1} F^T g.
template <class S>
Mat<S> metric_adjoint(const Mat<S>& g, const Mat<S>& g_inv, const Mat<S>& f) {
  return g_inv * f.transposed() * g;
}

template <class S>
Mat<S> metric_adjoint(const Mat<S>& g, const Mat<S>& f) {
  return metric_adjoint(g, inverse(g), f);
}

/// Entrywise size of F* + F; zero iff F is skew for the metric.
template <class S>
double skewness_residual(const Mat<S>& g, const Mat<S>& g_inv, const Mat<S>& f) {
  return (metric_adjoint(g, g_inv, f) + f).norm_inf();
}

template <class S>
bool is_metric_skew(const Mat<S>& g, const Mat<S>& f, double tol = kDefaultTol) {
  Mat<S> sum = metric_adjoint(g, f) + f;
  if constexpr (is_exact_v<S>)
    return sum.is_zero();
  else
    return sum.norm_inf() <= tol * std::max(1.0, f.norm_inf());
}

/// Degeneracy test for a symmetric form: |det| below tol * (max row norm)^n.
/// Exact mode tests det == 0.
template <class S>
bool is_degenerate_form(const Mat<S>& g, double tol = kDefaultTol) {
  if (g.rows() == 0) return false;
  S d = det(g);
  if constexpr (is_exact_v<S>) {
    return d == S(0);
  } else {
    double row_norm = 0.0;
    for (int i = 0; i < g.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < g.cols(); ++j) s += g(i, j) * g(i, j);
      row_norm = std::max(row_norm, std::sqrt(s));
    }
    double bound = tol * std::pow(std::max(row_norm, 1e-30), g.rows());
    return std::abs(d) <= bound;
  }
}

struct Signature {
  int negative = 0;
  int positive = 0;
};

namespace detail {

/// Sylvester counts by congruence diagonalization, exact arithmetic.
inline Signature signature_exact(Mat<Rational> m) {
  const int n = m.rows();
  Signature sig;
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    double best = 0.0;
    for (int i = k; i < n; ++i) {
      double mag = std::abs(to_double(m(i, i)));
      if (!(m(i, i) == Rational(0)) && mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (piv < 0) {
      // No nonzero diagonal entry; manufacture one from an off-diagonal pair.
      int oi = -1, oj = -1;
      for (int i = k; i < n && oi < 0; ++i)
        for (int j = i + 1; j < n; ++j)
          if (!(m(i, j) == Rational(0))) {
            oi = i;
            oj = j;
            break;
          }
      if (oi < 0) throw DegenerateMetric("symmetric form is degenerate");
      for (int j = 0; j < n; ++j) m(oi, j) += m(oj, j);
      for (int i = 0; i < n; ++i) m(i, oi) += m(i, oj);
      piv = oi;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      for (int i = 0; i < n; ++i) std::swap(m(i, k), m(i, piv));
    }
    Rational d = m(k, k);
    (sgn(d) > 0 ? sig.positive : sig.negative) += 1;
    for (int r = k + 1; r < n; ++r) {
      if (m(r, k) == Rational(0)) continue;
      Rational f = m(r, k) / d;
      for (int j = 0; j < n; ++j) m(r, j) -= f * m(k, j);
      for (int i = 0; i < n; ++i) m(i, r) -= f * m(i, k);
    }
  }
  return sig;
}

} // namespace detail

/// Inertia (q, n-q) of a nondegenerate symmetric form: q negative directions
/// first. Throws DegenerateMetric when the form has a (numerically) null
/// eigenvalue.
template <class S>
Signature signature(const Mat<S>& g, double tol = kDefaultTol) {
  if (g.rows() != g.cols()) throw DimensionMismatch("signature of non-square form");
  if constexpr (is_exact_v<S>) {
    return detail::signature_exact(g);
  } else {
    Signature sig;
    if (g.rows() == 0) return sig;
    auto ev = sym_eigenvalues(g);
    double scale = 0.0;
    for (double e : ev) scale = std::max(scale, std::abs(e));
    if (scale == 0.0) throw DegenerateMetric("symmetric form is degenerate");
    for (double e : ev) {
      if (std::abs(e) <= tol * scale) throw DegenerateMetric("symmetric form is degenerate");
      (e < 0 ? sig.negative : sig.positive) += 1;
    }
    return sig;
  }
}

template <class S>
struct OrthoBasis {
  Mat<S> basis;            ///< columns b_i with <b_i, b_j> = signs[i] * delta_ij
  std::vector<int> signs;  ///< +1 or -1, timelike (-1) entries first
};

/// Pseudo-Gram-Schmidt on the span of the given columns. Pivots on the vector
/// of largest |<v,v>| among the current vectors and, when every single vector
/// is isotropic, among pairwise sums and differences. Timelike results are
/// moved to the front. Exact mode needs each normalization to be a perfect
/// square and throws InexactSqrt otherwise.
template <class S>
OrthoBasis<S> pseudo_orthonormalize(const Mat<S>& g, const Mat<S>& span_cols,
                                    double tol = kDefaultTol) {
  const int n = g.rows();
  Mat<S> w = span_cols;
  std::vector<std::vector<S>> built;
  std::vector<int> signs;

  while (w.cols() > 0) {
    const int k = w.cols();
    Mat<S> gr = gram(g, w);
    double scale = std::max(gr.norm_inf(), 1e-300);

    auto isotropic = [&](const S& q) {
      if constexpr (is_exact_v<S>)
        return q == S(0);
      else
        return std::abs(to_double(q)) <= tol * scale;
    };

    // Best single vector first, then pairwise combinations.
    std::vector<S> v;
    S q(0);
    double best = 0.0;
    for (int i = 0; i < k; ++i) {
      double mag = std::abs(to_double(gr(i, i)));
      if (!isotropic(gr(i, i)) && mag > best) {
        best = mag;
        v = w.col(i);
        q = gr(i, i);
      }
    }
    if (best == 0.0) {
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          for (int s : {1, -1}) {
            S qq = gr(i, i) + gr(j, j) + scalar_from_int<S>(2 * s) * gr(i, j);
            double mag = std::abs(to_double(qq));
            if (!isotropic(qq) && mag > best) {
              best = mag;
              q = qq;
              v = w.col(i);
              const auto wj = w.col(j);
              for (int r = 0; r < n; ++r) v[r] += scalar_from_int<S>(s) * wj[r];
            }
          }
    }
    if (best == 0.0) throw DegenerateSubspace("restricted form vanishes on a nonzero subspace");

    int sign = to_double(q) > 0 ? 1 : -1;
    S denom = exact_sqrt<S>(sign > 0 ? q : S(-q));
    std::vector<S> b = v;
    for (auto& x : b) x = x / denom;

    // Remaining span: combinations of the current vectors orthogonal to b.
    Mat<S> row(1, k);
    for (int j = 0; j < k; ++j) {
      const auto wj = w.col(j);
      row(0, j) = dot_g(g, b, wj);
    }
    Mat<S> combos = kernel(row);
    w = w * combos;

    built.push_back(std::move(b));
    signs.push_back(sign);
  }

  // Stable reorder: timelike first.
  std::vector<std::vector<S>> ordered;
  std::vector<int> ordered_signs;
  for (int pass : {-1, 1})
    for (std::size_t i = 0; i < built.size(); ++i)
      if (signs[i] == pass) {
        ordered.push_back(built[i]);
        ordered_signs.push_back(signs[i]);
      }

  OrthoBasis<S> out;
  out.basis = from_cols(ordered, n);
  out.signs = std::move(ordered_signs);
  return out;
}

template <class S>
struct ComplementResult {
  Mat<S> complement;  ///< columns spanning {v : <v, s> = 0 for all s in span}
  bool degenerate = false;  ///< true when the restricted form is singular, so
                            ///< span + complement is not a direct sum
};

/// g-orthogonal complement of the span of the given columns.
template <class S>
ComplementResult<S> orthogonal_complement(const Mat<S>& g, const Mat<S>& span_cols) {
  ComplementResult<S> out;
  out.complement = kernel(span_cols.transposed() * g);
  if (span_cols.cols() == 0) return out;
  Mat<S> gr = gram(g, span_cols);
  out.degenerate = is_degenerate_form(gr);
  return out;
}

// ---- subspace predicates (columns span the subspace) ----

inline constexpr double kSpanTol = 1e-8;

template <class S>
bool span_contains(const Mat<S>& big, const Mat<S>& small, double tol = kSpanTol) {
  if (small.cols() == 0) return true;
  if constexpr (is_exact_v<S>) {
    return rank_of(hcat(big, small)) == rank_of(big);
  } else {
    // Project onto an orthonormal basis of big and compare.
    Mat<S> q = column_span(big);
    Mat<S> proj = q * (q.transposed() * small);
    double scale = std::max(small.norm_inf(), 1e-30);
    return (proj - small).norm_inf() <= tol * scale;
  }
}

template <class S>
bool same_span(const Mat<S>& a, const Mat<S>& b, double tol = kSpanTol) {
  return span_contains(a, b, tol) && span_contains(b, a, tol);
}

/// Intersection of two column spans, canonicalized.
template <class S>
Mat<S> span_intersection(const Mat<S>& a, const Mat<S>& b) {
  if (a.cols() == 0 || b.cols() == 0) return Mat<S>(a.rows(), 0);
  Mat<S> combos = kernel(hcat(a, -b));
  // First block of each kernel vector gives coefficients in a's columns.
  Mat<S> coeff(a.cols(), combos.cols());
  for (int i = 0; i < a.cols(); ++i)
    for (int j = 0; j < combos.cols(); ++j) coeff(i, j) = combos(i, j);
  return column_span(a * coeff);
}

} // namespace nilcurv
