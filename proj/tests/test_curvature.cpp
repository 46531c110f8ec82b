#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilcurv/curvature.hpp"
#include "nilcurv/families.hpp"
#include "nilcurv/sampling.hpp"

using namespace nilcurv;
using R = Rational;

namespace {

MetricLieAlgebra<R> heisenberg3() {
  MetricLieAlgebra<R> h(3, Mat<R>::identity(3));
  h.add_bracket(0, 1, 2, R(1));
  return h;
}

}  // namespace

TEST_CASE("Heisenberg curvature in exact arithmetic") {
  auto h = heisenberg3();
  auto rep = ricci_general(h);
  CHECK(rep.ric_op(0, 0) == R(-1, 2));
  CHECK(rep.ric_op(1, 1) == R(-1, 2));
  CHECK(rep.ric_op(2, 2) == R(1, 2));
  CHECK(rep.scalar == R(-1, 2));
  CHECK(rep.lambda_star == R(-1, 6));
  CHECK(rep.einstein_residual == doctest::Approx(2.0 / 3.0));

  // Sectional-style pairing <K(e1,e2)e2, e1> for the plane of the generators.
  auto lc = levi_civita(h);
  auto k12 = curvature_op(h, lc, unit_vector<R>(3, 0), unit_vector<R>(3, 1));
  auto v = mat_vec(k12, unit_vector<R>(3, 1));
  CHECK(dot_g(h.metric, v, unit_vector<R>(3, 0)) == R(3, 4));

  // The connection is metric: <L_u v, w> + <v, L_u w> = 0 on basis triples.
  for (int u = 0; u < 3; ++u)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        auto la = mat_vec(lc.op[u], unit_vector<R>(3, a));
        auto lb = mat_vec(lc.op[u], unit_vector<R>(3, b));
        CHECK(dot_g(h.metric, la, unit_vector<R>(3, b)) +
                  dot_g(h.metric, unit_vector<R>(3, a), lb) ==
              R(0));
      }
}

TEST_CASE("the two Ricci routes agree exactly and in floating point") {
  // Exact: pinned instances plus random two-step samples.
  auto h = heisenberg3();
  CHECK((ricci_general(h).ric - ricci_nilpotent(h).report.ric).is_zero());
  auto l6 = make_l6_19<R>(R(1, 2));
  CHECK((ricci_general(l6).ric - ricci_nilpotent(l6).report.ric).is_zero());

  SplitMix64 rng(21);
  for (int t = 0; t < 10; ++t) {
    auto a = random_two_step<R>(rng, 3, 7);
    CHECK((ricci_general(a).ric - ricci_nilpotent(a).report.ric).is_zero());
  }

  SplitMix64 rngf(22);
  for (int t = 0; t < 30; ++t) {
    auto a = random_two_step<double>(rngf, 3, 8);
    auto gen = ricci_general(a);
    auto nil = ricci_nilpotent(a);
    double scale = std::max(1.0, gen.ric.norm_inf());
    CHECK((gen.ric - nil.report.ric).norm_inf() / scale <= 1e-9);
  }
}

TEST_CASE("trace identity of the two structure terms") {
  SplitMix64 rng(23);
  for (int t = 0; t < 30; ++t) {
    auto a = random_two_step<double>(rng, 3, 8);
    auto nil = ricci_nilpotent(a);
    CHECK(std::abs(to_double(nil.j1.trace()) - to_double(nil.j2.trace())) <= 1e-10);
  }
  // Exactly, in rational mode.
  auto nil = ricci_nilpotent(make_l6_19<R>(R(2)));
  CHECK(nil.j1.trace() == nil.j2.trace());
}

TEST_CASE("product forms of the structure terms match the assembled ones") {
  auto h = make_three_step_dim6<R>(R(1), Dim6Variant::a, 1);
  auto nil = ricci_nilpotent(h);
  Mat<R> dcols = derived_ideal(h);
  CHECK((j1_product_form(h, dcols) - nil.j1).is_zero());
  CHECK((j2_product_form(h, dcols) - nil.j2).is_zero());
}

TEST_CASE("ricci_nilpotent requires nilpotency") {
  MetricLieAlgebra<R> s(2, Mat<R>::identity(2));
  s.add_bracket(0, 1, 1, R(1));
  CHECK_THROWS_AS(ricci_nilpotent(s), NotNilpotent);
}

TEST_CASE("einstein_check in all three modes") {
  // Einstein with a positive constant.
  auto c8 = make_conti8();
  auto ve = einstein_check(c8, EinsteinMode::einstein);
  CHECK(ve.passed);
  CHECK(std::abs(ve.lambda - 0.5) <= 1e-9);

  // Ricci-flat family.
  auto l6 = make_l6_19<double>(1.0);
  auto vf = einstein_check(l6, EinsteinMode::ricci_flat);
  CHECK(vf.passed);
  CHECK(vf.lambda == 0.0);
  // Heisenberg is not Ricci-flat and not Einstein.
  auto h = heisenberg3();
  CHECK(!einstein_check(h, EinsteinMode::ricci_flat).passed);
  CHECK(!einstein_check(h, EinsteinMode::einstein).passed);

  // Soliton: Ric = lambda Id + D with the exact derivation D = diag(1,1,2).
  Mat<R> d(3, 3);
  d(0, 0) = R(1);
  d(1, 1) = R(1);
  d(2, 2) = R(2);
  auto vs = einstein_check(h, EinsteinMode::soliton, std::make_optional(d));
  CHECK(vs.passed);
  CHECK(vs.lambda == R(-3, 2));
  CHECK(vs.residual == 0.0);
  CHECK(vs.derivation_residual == 0.0);
  CHECK(derivation_residual(h, d) == 0.0);

  // A non-derivation candidate still fits Ric = lambda Id + D, but the
  // derivation report is nonzero.
  Mat<R> nd(3, 3);
  nd(0, 0) = R(-1, 2) - R(-3, 2);
  nd(1, 1) = R(-1, 2) - R(-3, 2);
  nd(2, 2) = R(1, 2) - R(-3, 2);
  nd(0, 1) = R(0);
  auto vn = einstein_check(h, EinsteinMode::soliton, std::make_optional(nd));
  CHECK(vn.passed);  // same diagonal as d
  CHECK(vn.derivation_residual == 0.0);
  Mat<R> wrong = Mat<R>::identity(3);
  auto vw = einstein_check(h, EinsteinMode::soliton, std::make_optional(wrong));
  CHECK(!vw.passed);

  CHECK_THROWS_AS(einstein_check(h, EinsteinMode::soliton), ValidationError);
}

TEST_CASE("curvature invariants transport through isometric basis change") {
  auto h = make_three_step_dim7<double>(1.0, 2.0, 1, 1);
  Mat<double> t = Mat<double>::identity(7);
  t(0, 3) = 0.25;  // unipotent shear: same algebra in a different basis
  t(2, 5) = -0.5;
  auto moved = change_basis(h, t);
  auto a = ricci_general(h);
  auto b = ricci_general(moved);
  CHECK(std::abs(to_double(a.scalar) - to_double(b.scalar)) <= 1e-9);
  CHECK(std::abs(to_double(a.lambda_star) - to_double(b.lambda_star)) <= 1e-9);
  // The Ricci bilinear form pulls back through the transform.
  Mat<double> pulled = t.transposed() * a.ric * t;
  CHECK((pulled - b.ric).norm_inf() <= 1e-9);
}
