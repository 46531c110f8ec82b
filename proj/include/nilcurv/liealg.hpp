#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nilcurv/pseudolinalg.hpp"

namespace nilcurv {

/// Lie algebra with a fixed basis, structure constants stored densely for
/// index pairs i < j, and a pseudo-Euclidean metric in the same basis.
template <class S>
struct MetricLieAlgebra {
  int n = 0;
  Mat<S> metric;
  std::vector<std::vector<S>> c;  ///< c[pair_index(i,j)][k] = coefficient of e_k in [e_i, e_j]

  MetricLieAlgebra() = default;
  MetricLieAlgebra(int dim, Mat<S> g)
      : n(dim), metric(std::move(g)), c(static_cast<std::size_t>(dim) * (dim - 1) / 2, std::vector<S>(dim, S(0))) {}

  int pair_index(int i, int j) const {
    // i < j enumerated row by row: (0,1), (0,2), ..., (1,2), ...
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

  void add_bracket(int i, int j, int k, const S& coef) {
    if (i == j) throw ValidationError("bracket [e_i, e_i] must be zero");
    if (i > j)
      c[pair_index(j, i)][k] -= coef;
    else
      c[pair_index(i, j)][k] += coef;
  }

  std::vector<S> bracket_basis(int i, int j) const {
    std::vector<S> v(n, S(0));
    if (i == j) return v;
    if (i < j) return c[pair_index(i, j)];
    v = c[pair_index(j, i)];
    for (auto& x : v) x = -x;
    return v;
  }

  std::vector<S> bracket(const std::vector<S>& u, const std::vector<S>& v) const {
    std::vector<S> out(n, S(0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        S f = u[i] * v[j] - u[j] * v[i];
        if (f == S(0)) continue;
        const auto& w = c[pair_index(i, j)];
        for (int k = 0; k < n; ++k) out[k] += f * w[k];
      }
    return out;
  }

  /// Matrix of ad_{e_i} : v -> [e_i, v].
  Mat<S> ad(int i) const {
    Mat<S> a(n, n);
    for (int j = 0; j < n; ++j) {
      auto w = bracket_basis(i, j);
      for (int k = 0; k < n; ++k) a(k, j) = w[k];
    }
    return a;
  }

  Mat<S> ad_of(const std::vector<S>& u) const {
    Mat<S> a(n, n);
    for (int j = 0; j < n; ++j) {
      std::vector<S> ej(n, S(0));
      ej[j] = S(1);
      auto w = bracket(u, ej);
      for (int k = 0; k < n; ++k) a(k, j) = w[k];
    }
    return a;
  }
};

/// Largest Jacobi defect over basis triples,
/// max_{i<j<k} |[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]|.
template <class S>
double jacobi_residual(const MetricLieAlgebra<S>& a) {
  double worst = 0.0;
  std::vector<S> ei(a.n, S(0)), ej(a.n, S(0)), ek(a.n, S(0));
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j)
      for (int k = j + 1; k < a.n; ++k) {
        std::fill(ei.begin(), ei.end(), S(0));
        std::fill(ej.begin(), ej.end(), S(0));
        std::fill(ek.begin(), ek.end(), S(0));
        ei[i] = S(1);
        ej[j] = S(1);
        ek[k] = S(1);
        auto s1 = a.bracket(a.bracket_basis(i, j), ek);
        auto s2 = a.bracket(a.bracket_basis(j, k), ei);
        auto s3 = a.bracket(a.bracket_basis(k, i), ej);
        for (int t = 0; t < a.n; ++t)
          worst = std::max(worst, std::abs(to_double(s1[t] + s2[t] + s3[t])));
      }
  return worst;
}

/// Checks the metric is square, symmetric and nondegenerate and the bracket
/// satisfies Jacobi. Throws on violation.
template <class S>
void validate(const MetricLieAlgebra<S>& a, double tol = kDefaultTol) {
  if (a.metric.rows() != a.n || a.metric.cols() != a.n)
    throw ValidationError("metric has the wrong shape");
  Mat<S> asym = a.metric - a.metric.transposed();
  if constexpr (is_exact_v<S>) {
    if (!asym.is_zero()) throw ValidationError("metric is not symmetric");
  } else {
    if (asym.norm_inf() > tol * std::max(1.0, a.metric.norm_inf()))
      throw ValidationError("metric is not symmetric");
  }
  if (is_degenerate_form(a.metric, tol)) throw DegenerateMetric("metric is degenerate");
  double jr = jacobi_residual(a);
  double scale = 1.0;
  if constexpr (!is_exact_v<S>) {
    for (const auto& w : a.c)
      for (const auto& x : w) scale = std::max(scale, std::abs(to_double(x)));
    scale = scale * scale;
  }
  if (jr > (is_exact_v<S> ? 0.0 : tol * scale))
    throw ValidationError("bracket fails the Jacobi identity, residual " + format_scalar(jr));
}

/// Center {u : [u, v] = 0 for all v}, as columns.
template <class S>
Mat<S> center(const MetricLieAlgebra<S>& a) {
  // Stack the maps u -> coefficient of e_k in [u, e_j] over all (j, k).
  Mat<S> m(a.n * a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      auto w = a.bracket_basis(i, j);
      for (int k = 0; k < a.n; ++k) m(j * a.n + k, i) = w[k];
    }
  return kernel(m);
}

/// Derived ideal [g, g] = span of all basis brackets, as columns.
template <class S>
Mat<S> derived_ideal(const MetricLieAlgebra<S>& a) {
  std::vector<std::vector<S>> cols;
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j) cols.push_back(a.bracket_basis(i, j));
  if (cols.empty()) return Mat<S>(a.n, 0);
  return column_span(from_cols(cols, a.n));
}

/// Span of [span_u, span_v] over all pairs of basis columns.
template <class S>
Mat<S> bracket_span(const MetricLieAlgebra<S>& a, const Mat<S>& u_cols, const Mat<S>& v_cols) {
  std::vector<std::vector<S>> cols;
  for (int i = 0; i < u_cols.cols(); ++i)
    for (int j = 0; j < v_cols.cols(); ++j) cols.push_back(a.bracket(u_cols.col(i), v_cols.col(j)));
  if (cols.empty()) return Mat<S>(a.n, 0);
  return column_span(from_cols(cols, a.n));
}

/// Lower central series C^2 = [g,g], C^{k+1} = [C^k, g], returned from C^2 up
/// to and including the first zero term. Throws NotNilpotent if the series
/// stabilizes at a nonzero subspace (capped at dim steps).
template <class S>
std::vector<Mat<S>> lower_central_series(const MetricLieAlgebra<S>& a) {
  std::vector<Mat<S>> chain;
  Mat<S> full = Mat<S>::identity(a.n);
  Mat<S> cur = derived_ideal(a);
  for (int step = 0; step <= a.n; ++step) {
    chain.push_back(cur);
    if (cur.cols() == 0) return chain;
    Mat<S> next = bracket_span(a, cur, full);
    if (next.cols() >= cur.cols())
      throw NotNilpotent("lower central series stabilizes at dimension " + std::to_string(cur.cols()));
    cur = std::move(next);
  }
  throw NotNilpotent("lower central series did not reach zero");
}

/// Nilpotency class k: the smallest k with C^{k+1} = 0. Abelian algebras have
/// class 1 by this convention.
template <class S>
int nilpotency_class(const MetricLieAlgebra<S>& a) {
  return static_cast<int>(lower_central_series(a).size());
}

/// Coordinates of w in the span of the given (independent) columns.
template <class S>
std::vector<S> coords_in_span(const Mat<S>& basis_cols, const std::vector<S>& w,
                              double* residual = nullptr) {
  if constexpr (is_exact_v<S>) {
    Mat<S> rhs(basis_cols.rows(), 1);
    for (int i = 0; i < basis_cols.rows(); ++i) rhs(i, 0) = w[i];
    Rref<S> r = rref(hcat(basis_cols, rhs));
    std::vector<S> x(basis_cols.cols(), S(0));
    double res = 0.0;
    for (int row = 0; row < r.rank; ++row) {
      int pc = r.pivot_cols[row];
      if (pc == basis_cols.cols()) {
        res = 1.0;  // inconsistent system
        break;
      }
      x[pc] = r.mat(row, basis_cols.cols());
    }
    if (residual) *residual = res;
    return x;
  } else {
    auto x = lsq_solve(basis_cols, w);
    if (residual) {
      auto back = mat_vec(basis_cols, x);
      double r = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) r = std::max(r, std::abs(back[i] - w[i]));
      *residual = r;
    }
    return x;
  }
}

/// Structure endomorphisms J_i for a basis (columns) of a subspace containing
/// [g, g]: the metric-skew maps with [u, v] = sum_i <J_i u, v> b_i.
template <class S>
std::vector<Mat<S>> structure_endos(const MetricLieAlgebra<S>& a, const Mat<S>& derived_cols) {
  const int k = derived_cols.cols();
  Mat<S> g_inv = inverse(a.metric);
  // C_i[a][b] = i-th coordinate of [e_a, e_b] in the given basis.
  std::vector<Mat<S>> comps(k, Mat<S>(a.n, a.n));
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j) {
      auto w = a.bracket_basis(i, j);
      bool zero = true;
      for (const auto& x : w)
        if (!(x == S(0))) {
          zero = false;
          break;
        }
      if (zero) continue;
      auto x = coords_in_span(derived_cols, w);
      for (int t = 0; t < k; ++t) {
        comps[t](i, j) = x[t];
        comps[t](j, i) = -x[t];
      }
    }
  std::vector<Mat<S>> out;
  out.reserve(k);
  for (int t = 0; t < k; ++t) out.push_back(-(g_inv * comps[t]));
  return out;
}

/// How far the operator d is from being a derivation of the bracket,
/// max_{i<j} |d[e_i,e_j] - [d e_i, e_j] - [e_i, d e_j]|.
template <class S>
double derivation_residual(const MetricLieAlgebra<S>& a, const Mat<S>& d) {
  double worst = 0.0;
  std::vector<S> ei(a.n, S(0)), ej(a.n, S(0));
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j) {
      std::fill(ei.begin(), ei.end(), S(0));
      std::fill(ej.begin(), ej.end(), S(0));
      ei[i] = S(1);
      ej[j] = S(1);
      auto lhs = mat_vec(d, a.bracket_basis(i, j));
      auto r1 = a.bracket(d.col(i), ej);
      auto r2 = a.bracket(ei, d.col(j));
      for (int t = 0; t < a.n; ++t)
        worst = std::max(worst, std::abs(to_double(lhs[t] - r1[t] - r2[t])));
    }
  return worst;
}

/// Pull the algebra through an invertible basis change: new basis vectors are
/// the columns of t expressed in the old basis.
template <class S>
MetricLieAlgebra<S> change_basis(const MetricLieAlgebra<S>& a, const Mat<S>& t) {
  auto t_inv_opt = try_solve(t, Mat<S>::identity(a.n));
  if (!t_inv_opt) throw SingularTransform("basis change matrix is singular");
  const Mat<S>& t_inv = *t_inv_opt;
  MetricLieAlgebra<S> b(a.n, t.transposed() * a.metric * t);
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j) {
      auto w = a.bracket(t.col(i), t.col(j));
      auto coords = mat_vec(t_inv, w);
      for (int k = 0; k < a.n; ++k)
        if (!(coords[k] == S(0))) b.add_bracket(i, j, k, coords[k]);
    }
  return b;
}

} // namespace nilcurv
