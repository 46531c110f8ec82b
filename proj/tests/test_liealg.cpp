#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilcurv/families.hpp"
#include "nilcurv/liealg.hpp"

using namespace nilcurv;
using R = Rational;

namespace {

MetricLieAlgebra<R> heisenberg3() {
  MetricLieAlgebra<R> h(3, Mat<R>::identity(3));
  h.add_bracket(0, 1, 2, R(1));
  return h;
}

}  // namespace

TEST_CASE("bracket table accumulates with antisymmetry") {
  MetricLieAlgebra<R> a(3, Mat<R>::identity(3));
  a.add_bracket(0, 1, 2, R(1));
  a.add_bracket(1, 0, 2, R(1, 4));  // reversed order subtracts
  CHECK(a.bracket_basis(0, 1)[2] == R(3, 4));
  CHECK(a.bracket_basis(1, 0)[2] == R(-3, 4));
  CHECK_THROWS_AS(a.add_bracket(1, 1, 0, R(1)), ValidationError);

  // Bilinearity of the vector bracket.
  std::vector<R> u = {R(2), R(0), R(5)}, v = {R(0), R(3), R(-1)};
  auto w = a.bracket(u, v);
  CHECK(w[2] == R(2) * R(3) * R(3, 4));
  CHECK(w[0] == R(0));

  // ad matrix columns are brackets with basis vectors.
  Mat<R> ad0 = a.ad(0);
  CHECK(ad0(2, 1) == R(3, 4));
  CHECK(ad0(2, 0) == R(0));
  Mat<R> adu = a.ad_of(u);
  CHECK(adu(2, 1) == R(2) * R(3, 4));
}

TEST_CASE("validate accepts metric nilpotent algebras and rejects bad input") {
  CHECK_NOTHROW(validate(heisenberg3()));

  // Degenerate metric.
  MetricLieAlgebra<R> bad(2, Mat<R>(2, 2));
  CHECK_THROWS_AS(validate(bad), DegenerateMetric);

  // Jacobi violation: [e1,e2]=e3, [e1,e3]=e1 fails the identity.
  MetricLieAlgebra<double> nj(3, Mat<double>::identity(3));
  nj.add_bracket(0, 1, 2, 1.0);
  nj.add_bracket(0, 2, 0, 1.0);
  CHECK_THROWS_AS(validate(nj), ValidationError);
}

TEST_CASE("center, derived ideal, lower central series, class") {
  auto h = heisenberg3();
  Mat<R> z = center(h);
  CHECK(z.cols() == 1);
  CHECK(z(2, 0) != R(0));
  CHECK(derived_ideal(h).cols() == 1);
  CHECK(nilpotency_class(h) == 2);

  MetricLieAlgebra<R> ab(4, Mat<R>::identity(4));
  CHECK(center(ab).cols() == 4);
  CHECK(derived_ideal(ab).cols() == 0);
  CHECK(nilpotency_class(ab) == 1);

  // Series starts at [g, g] and ends with the first zero term.
  auto series = lower_central_series(h);
  REQUIRE(series.size() == 2);
  CHECK(series[0].cols() == 1);
  CHECK(series[1].cols() == 0);

  // l6_19 is 3-step with a 1-dimensional center.
  auto l6 = make_l6_19<R>(R(1));
  CHECK(nilpotency_class(l6) == 3);
  CHECK(center(l6).cols() == 1);

  // Solvable non-nilpotent input is rejected.
  MetricLieAlgebra<R> s(2, Mat<R>::identity(2));
  s.add_bracket(0, 1, 1, R(1));
  CHECK_THROWS_AS(nilpotency_class(s), NotNilpotent);
}

TEST_CASE("coordinates in a span round trip") {
  Mat<R> basis(3, 2);
  basis(0, 0) = R(1);
  basis(1, 0) = R(1);
  basis(2, 1) = R(2);
  std::vector<R> w = {R(3), R(3), R(-4)};
  auto coords = coords_in_span(basis, w);
  REQUIRE(coords.size() == 2);
  CHECK(coords[0] == R(3));
  CHECK(coords[1] == R(-2));
}

TEST_CASE("structure endomorphisms reproduce the bracket pairing") {
  // [u, v] = sum_i <J_i u, v> b_i over a derived-ideal basis b_i.
  auto h = make_l6_19<R>(R(2));
  Mat<R> dcols = derived_ideal(h);
  auto js = structure_endos(h, dcols);
  REQUIRE(static_cast<int>(js.size()) == dcols.cols());
  for (int i = 0; i < h.n; ++i)
    for (int j = 0; j < h.n; ++j) {
      std::vector<R> ei = unit_vector<R>(h.n, i), ej = unit_vector<R>(h.n, j);
      auto br = h.bracket(ei, ej);
      std::vector<R> rebuilt(h.n, R(0));
      for (std::size_t t = 0; t < js.size(); ++t) {
        R coef = dot_g(h.metric, mat_vec(js[t], ei), ej);
        for (int r = 0; r < h.n; ++r) rebuilt[r] += coef * dcols(r, static_cast<int>(t));
      }
      for (int r = 0; r < h.n; ++r) CHECK(br[r] == rebuilt[r]);
    }
}

TEST_CASE("derivation residual vanishes exactly on ad_x") {
  auto l6 = make_l6_19<R>(R(1));
  for (int x = 0; x < l6.n; ++x) CHECK(derivation_residual(l6, l6.ad(x)) == 0.0);
  // The identity map is not a derivation of a nonabelian algebra.
  CHECK(derivation_residual(l6, Mat<R>::identity(l6.n)) > 0.5);
}

TEST_CASE("change of basis transports brackets and metric together") {
  auto h = heisenberg3();
  Mat<R> t = Mat<R>::of({{R(2), R(0), R(0)}, {R(0), R(1), R(1)}, {R(0), R(0), R(1)}});
  auto moved = change_basis(h, t);
  validate(moved);
  // Metric moves by congruence.
  CHECK((moved.metric - t.transposed() * h.metric * t).is_zero());
  // Brackets move contravariantly: [u, v]' = T^{-1} [Tu, Tv].
  Mat<R> tinv = inverse(t);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      std::vector<R> tu = t.col(i), tv = t.col(j);
      auto big = h.bracket(tu, tv);
      auto expect = mat_vec(tinv, big);
      auto got = moved.bracket_basis(i, j);
      for (int k = 0; k < 3; ++k) CHECK(got[k] == expect[k]);
    }
  CHECK(nilpotency_class(moved) == 2);
  CHECK_THROWS_AS(change_basis(h, Mat<R>(3, 3)), SingularTransform);
}
