#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilcurv/pseudolinalg.hpp"
#include "nilcurv/rng.hpp"

using namespace nilcurv;
using R = Rational;

TEST_CASE("matrix basics: rref, kernel, det, solve, inverse") {
  Mat<R> m = Mat<R>::of({{R(1), R(2), R(3)}, {R(2), R(4), R(6)}, {R(0), R(1), R(1)}});
  auto rr = rref(m);
  CHECK(rr.rank == 2);
  Mat<R> k = kernel_by_elimination(m);
  CHECK(k.cols() == 1);
  // m * k = 0 exactly.
  CHECK((m * k).is_zero());

  Mat<R> a = Mat<R>::of({{R(2), R(1)}, {R(1), R(1)}});
  CHECK(det(a) == R(1));
  Mat<R> inv = inverse(a);
  CHECK((a * inv - Mat<R>::identity(2)).is_zero());

  Mat<R> b(2, 1);
  b(0, 0) = R(3);
  b(1, 0) = R(2);
  auto x = try_solve(a, b);
  REQUIRE(x.has_value());
  CHECK((a * *x - b).is_zero());

  Mat<R> sing = Mat<R>::of({{R(1), R(1)}, {R(1), R(1)}});
  CHECK(det(sing) == R(0));
  CHECK_THROWS_AS(inverse(sing), SingularTransform);
}

TEST_CASE("dot_g and gram under an indefinite form") {
  Mat<R> g = Mat<R>::of({{R(-1), R(0)}, {R(0), R(1)}});
  std::vector<R> u = {R(1), R(2)}, v = {R(3), R(1)};
  CHECK(dot_g(g, u, v) == R(-1));  // -1*3 + 2*1
  Mat<R> cols = Mat<R>::identity(2);
  CHECK((gram(g, cols) - g).is_zero());
}

TEST_CASE("metric adjoint satisfies the defining pairing identity") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    int n = rng.uniform_int(2, 5);
    Mat<double> g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double e = rng.uniform(-1.0, 1.0);
        g(i, j) = e;
        g(j, i) = e;
      }
      g(i, i) += (i == 0 ? -3.0 : 3.0);  // keep it nondegenerate and indefinite
    }
    Mat<double> f(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f(i, j) = rng.uniform(-1.0, 1.0);
    Mat<double> fs = metric_adjoint(g, f);
    for (int t = 0; t < 4; ++t) {
      std::vector<double> u(n), v(n);
      for (int i = 0; i < n; ++i) {
        u[i] = rng.uniform(-1.0, 1.0);
        v[i] = rng.uniform(-1.0, 1.0);
      }
      double lhs = dot_g(g, mat_vec(f, u), v);
      double rhs = dot_g(g, u, mat_vec(fs, v));
      CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
  }
}

TEST_CASE("metric skewness") {
  Mat<R> g = Mat<R>::of({{R(-1), R(0)}, {R(0), R(1)}});
  // f is g-skew iff (gf) is antisymmetric; build one from an antisymmetric w.
  Mat<R> w = Mat<R>::of({{R(0), R(2)}, {R(-2), R(0)}});
  Mat<R> f = inverse(g) * w;
  CHECK(is_metric_skew(g, f));
  CHECK(skewness_residual(g, inverse(g), f) == 0.0);
  Mat<R> not_skew = Mat<R>::identity(2);
  CHECK(!is_metric_skew(g, not_skew));
}

TEST_CASE("signature on pinned forms") {
  auto sig_id = signature(Mat<R>::identity(3));
  CHECK(sig_id.negative == 0);
  CHECK(sig_id.positive == 3);

  auto sig_diag = signature(Mat<R>::of({{R(-4), R(0)}, {R(0), R(9)}}));
  CHECK(sig_diag.negative == 1);
  CHECK(sig_diag.positive == 1);

  // Hyperbolic plane: no diagonal entries at all, still signature (1,1).
  auto sig_hyp = signature(Mat<R>::of({{R(0), R(1)}, {R(1), R(0)}}));
  CHECK(sig_hyp.negative == 1);
  CHECK(sig_hyp.positive == 1);

  CHECK_THROWS_AS(signature(Mat<R>::of({{R(1), R(1)}, {R(1), R(1)}})), DegenerateMetric);
}

TEST_CASE("signature is invariant under congruence") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    int n = rng.uniform_int(2, 6);
    int neg = rng.uniform_int(0, n);
    Mat<double> eta(n, n);
    for (int i = 0; i < n; ++i) eta(i, i) = i < neg ? -1.0 : 1.0;
    // Random invertible T: unipotent upper triangular times a diagonal.
    Mat<double> t(n, n);
    for (int i = 0; i < n; ++i) {
      t(i, i) = rng.uniform(0.5, 2.0) * (rng.uniform_int(0, 1) ? 1.0 : -1.0);
      for (int j = i + 1; j < n; ++j) t(i, j) = rng.uniform(-1.0, 1.0);
    }
    Mat<double> m = t.transposed() * eta * t;
    auto sig = signature(m);
    CHECK(sig.negative == neg);
    CHECK(sig.positive == n - neg);
  }
}

TEST_CASE("pseudo-orthonormalization") {
  // Euclidean identity: fixed point, all signs +.
  auto ob = pseudo_orthonormalize(Mat<R>::identity(3), Mat<R>::identity(3));
  CHECK((ob.basis - Mat<R>::identity(3)).is_zero());
  for (int s : ob.signs) CHECK(s == 1);

  // diag(-4, 9): scale columns to (e1/2, e2/3), signs (-, +).
  auto od = pseudo_orthonormalize(Mat<R>::of({{R(-4), R(0)}, {R(0), R(9)}}),
                                  Mat<R>::identity(2));
  CHECK(od.signs.size() == 2);
  CHECK(od.signs[0] == -1);
  CHECK(od.signs[1] == 1);
  CHECK(od.basis(0, 0) == R(1, 2));
  CHECK(od.basis(1, 1) == R(1, 3));

  // Result Gram is the sign diagonal.
  Mat<R> g = Mat<R>::of({{R(0), R(-2)}, {R(-2), R(0)}});
  auto oh = pseudo_orthonormalize(g, Mat<R>::identity(2));
  Mat<R> gram_out = gram(g, oh.basis);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(gram_out(i, j) == (i == j ? R(oh.signs[i]) : R(0)));
}

TEST_CASE("orthogonal complement splits the space when nondegenerate") {
  Mat<double> g(3, 3);
  g(0, 0) = -1.0;
  g(1, 1) = 1.0;
  g(2, 2) = 1.0;
  Mat<double> span(3, 1);
  span(1, 0) = 1.0;
  auto comp = orthogonal_complement(g, span);
  CHECK(comp.complement.cols() == 2);
  CHECK(!comp.degenerate);
  // Complement is g-orthogonal to the span.
  Mat<double> cross = span.transposed() * g * comp.complement;
  CHECK(cross.norm_inf() <= 1e-12);

  // A null vector has a degenerate restricted form: flagged, and the
  // complement still contains the null direction (no direct sum).
  Mat<double> gh(2, 2);
  gh(0, 1) = 1.0;
  gh(1, 0) = 1.0;
  Mat<double> null_span(2, 1);
  null_span(0, 0) = 1.0;
  auto bad = orthogonal_complement(gh, null_span);
  CHECK(bad.degenerate);
  CHECK(span_contains(bad.complement, null_span));
}

TEST_CASE("span predicates") {
  Mat<double> big(3, 2);
  big(0, 0) = 1.0;
  big(1, 1) = 1.0;
  Mat<double> small(3, 1);
  small(0, 0) = 2.0;
  small(1, 0) = -1.0;
  CHECK(span_contains(big, small));
  Mat<double> outside(3, 1);
  outside(2, 0) = 1.0;
  CHECK(!span_contains(big, outside));
  CHECK(same_span(big, hcat(small, big)));
  Mat<double> inter = span_intersection(big, hcat(small, outside));
  CHECK(inter.cols() == 1);
  CHECK(span_contains(big, inter));
}
