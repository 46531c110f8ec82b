#pragma once

#include <optional>
#include <vector>

#include "nilcurv/attributes.hpp"
#include "nilcurv/liealg.hpp"
#include "nilcurv/numeric.hpp"
#include "nilcurv/rng.hpp"

namespace nilcurv {

/// Deterministic random constructions for test corpora: nondegenerate metrics
/// of a chosen signature, two-step nilpotent metric Lie algebras in both
/// scalar modes, and value-space cocycles on a given algebra. Every function
/// is a pure function of the generator state it consumes, so a fixed seed
/// reproduces the same objects on every platform.

namespace detail {

inline double random_entry(SplitMix64& rng, double /*tag*/) { return rng.uniform(-1.0, 1.0); }

/// Small rationals k/d, k in [-4, 4], d in [1, 4]; keeps exact arithmetic
/// cheap while still exercising non-integer entries. The two-argument
/// constructor does not reduce the fraction, and GMP's rational arithmetic
/// requires canonical operands, so canonicalize before handing the value out.
inline Rational random_entry(SplitMix64& rng, Rational /*tag*/) {
  long k = rng.uniform_int(-4, 4);
  long d = rng.uniform_int(1, 4);
  Rational r(k, d);
  r.canonicalize();
  return r;
}

} // namespace detail

/// Symmetric nondegenerate matrix R^T eta R where eta has `timelike` entries
/// equal to -1 followed by +1s, and R is unipotent upper-triangular with
/// random strictly-upper entries. det(R) = 1, so the result is nondegenerate
/// in either scalar mode without any tolerance question, and its signature is
/// exactly that of eta.
template <class S>
Mat<S> random_metric(SplitMix64& rng, int n, int timelike) {
  if (n <= 0) throw ParameterOutOfRange("metric dimension must be positive");
  if (timelike < 0 || timelike > n) throw ParameterOutOfRange("timelike count out of range");
  Mat<S> r = Mat<S>::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) r(i, j) = detail::random_entry(rng, S(0));
  Mat<S> eta(n, n);
  for (int i = 0; i < n; ++i) eta(i, i) = (i < timelike) ? S(-1) : S(1);
  return r.transposed() * eta * r;
}

/// Random two-step nilpotent metric Lie algebra: the last `m` basis vectors
/// are central and the first n-m bracket into them with random coefficients.
/// The Jacobi identity holds identically for this shape, and the lower
/// central series terminates after one step whenever some bracket is nonzero.
/// The metric has `timelike` negative directions (0 = Euclidean,
/// 1 = Lorentzian).
template <class S>
MetricLieAlgebra<S> random_two_step(SplitMix64& rng, int n, int m, int timelike) {
  if (m < 1 || m >= n) throw ParameterOutOfRange("central tail must satisfy 1 <= m < n");
  MetricLieAlgebra<S> a(n, random_metric<S>(rng, n, timelike));
  const int q = n - m;
  bool nonzero = false;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      for (int t = 0; t < m; ++t) {
        S c = detail::random_entry(rng, S(0));
        if (!(c == S(0))) {
          a.add_bracket(i, j, q + t, c);
          nonzero = true;
        }
      }
  // Guarantee nonabelian so the nilpotency class is exactly 2.
  if (!nonzero) a.add_bracket(0, 1, q, S(1));
  return a;
}

/// Draws dimension in [min_dim, max_dim], a central tail of 1..min(3, n-2)
/// directions, and a Euclidean or Lorentzian metric at random.
template <class S>
MetricLieAlgebra<S> random_two_step(SplitMix64& rng, int min_dim, int max_dim) {
  int n = rng.uniform_int(min_dim, max_dim);
  int m = rng.uniform_int(1, std::max(1, std::min(3, n - 2)));
  int timelike = rng.uniform_int(0, 1);
  return random_two_step<S>(rng, n, m, timelike);
}

/// Basis of the solution space of the 2-cocycle identity on `g`, expressed in
/// the q(q-1)/2 upper-triangle coordinates of an antisymmetric coefficient
/// form W. Columns span all scalar-valued 2-cocycles; the span always
/// contains the coboundaries -alpha([.,.]), so it is nonzero for any
/// nonabelian algebra.
inline Mat<double> cocycle_solution_space(const MetricLieAlgebra<double>& g) {
  const int q = g.n;
  const int vars = q * (q - 1) / 2;
  auto var_index = [q](int a, int b) { return a * q - a * (a + 1) / 2 + (b - a - 1); };
  // Entry W(r, c) as a signed variable reference; W(c, r) = -W(r, c).
  const int triples = q * (q - 1) * (q - 2) / 6;
  Mat<double> rows(std::max(1, triples), vars);
  int row = 0;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b)
      for (int c = b + 1; c < q; ++c) {
        auto ab = g.bracket_basis(a, b);
        auto bc = g.bracket_basis(b, c);
        auto ca = g.bracket_basis(c, a);
        auto add = [&](const std::vector<double>& v, int other) {
          for (int k = 0; k < q; ++k) {
            if (v[k] == 0.0 || k == other) continue;
            if (k < other)
              rows(row, var_index(k, other)) += v[k];
            else
              rows(row, var_index(other, k)) -= v[k];
          }
        };
        add(ab, c);
        add(bc, a);
        add(ca, b);
        ++row;
      }
  return kernel(rows);
}

/// Random p-component cocycle on `g` with metric-skew representing operators
/// S_i = -G^{-1} W_i, sampled as random combinations of the cocycle solution
/// space. When `require_rigid` is set, redraws until ker(omega) meets Z(g)
/// trivially; returns nullopt if no rigid draw appears within `attempts`.
inline std::optional<CocycleData<double>> random_cocycle(SplitMix64& rng,
                                                         const MetricLieAlgebra<double>& g, int p,
                                                         bool require_rigid = false,
                                                         int attempts = 64) {
  const int q = g.n;
  Mat<double> basis = cocycle_solution_space(g);
  if (basis.cols() == 0) return std::nullopt;
  Mat<double> g_inv = inverse(g.metric);
  auto draw = [&]() {
    CocycleData<double> om;
    om.g_dim = q;
    for (int i = 0; i < p; ++i) {
      std::vector<double> coeff(basis.cols());
      for (auto& x : coeff) x = rng.uniform(-1.0, 1.0);
      Mat<double> w(q, q);
      int t = 0;
      for (int a = 0; a < q; ++a)
        for (int b = a + 1; b < q; ++b, ++t) {
          double val = 0.0;
          for (int s = 0; s < basis.cols(); ++s) val += basis(t, s) * coeff[s];
          w(a, b) = val;
          w(b, a) = -val;
        }
      om.s_ops.push_back(-(g_inv * w));
    }
    return om;
  };
  for (int k = 0; k < attempts; ++k) {
    CocycleData<double> om = draw();
    if (!require_rigid || rigidity_holds(g, om)) return om;
  }
  return std::nullopt;
}

} // namespace nilcurv
