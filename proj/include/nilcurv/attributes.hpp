#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nilcurv/curvature.hpp"

namespace nilcurv {

/// A 2-cocycle on a metric Lie algebra g with values in R^p, stored through
/// the metric-skew operators S_1..S_p that represent it against a basis
/// (z_1..z_p) of the value space:
///   omega(u, v) = sum_i <S_i u, v>_g z_i.
template <class S>
struct CocycleData {
  int g_dim = 0;
  std::vector<Mat<S>> s_ops;

  int p() const { return static_cast<int>(s_ops.size()); }
};

/// Coefficient forms W_i = S_i^T G, so that the z_i-coordinate of
/// omega(e_a, e_b) is W_i(a, b). Each W_i is antisymmetric when S_i is
/// metric-skew.
template <class S>
std::vector<Mat<S>> cocycle_forms(const Mat<S>& g_metric, const CocycleData<S>& om) {
  std::vector<Mat<S>> w;
  w.reserve(om.s_ops.size());
  for (const auto& s : om.s_ops) w.push_back(s.transposed() * g_metric);
  return w;
}

/// Worst metric-skewness defect among the representing operators.
template <class S>
double cocycle_skewness_residual(const Mat<S>& g_metric, const CocycleData<S>& om) {
  Mat<S> g_inv = inverse(g_metric);
  double worst = 0.0;
  for (const auto& s : om.s_ops) worst = std::max(worst, skewness_residual(g_metric, g_inv, s));
  return worst;
}

/// Largest defect of the 2-cocycle identity over basis triples and value
/// coordinates: omega([u,v], w) + omega([v,w], u) + omega([w,u], v) = 0.
template <class S>
double cocycle_residual(const MetricLieAlgebra<S>& g, const CocycleData<S>& om) {
  auto w = cocycle_forms(g.metric, om);
  double worst = 0.0;
  for (int a = 0; a < g.n; ++a)
    for (int b = a + 1; b < g.n; ++b)
      for (int c = b + 1; c < g.n; ++c) {
        auto ab = g.bracket_basis(a, b);
        auto bc = g.bracket_basis(b, c);
        auto ca = g.bracket_basis(c, a);
        for (const auto& wi : w) {
          S total(0);
          for (int k = 0; k < g.n; ++k)
            total += ab[k] * wi(k, c) + bc[k] * wi(k, a) + ca[k] * wi(k, b);
          worst = std::max(worst, std::abs(to_double(total)));
        }
      }
  return worst;
}

/// Kernel of omega as a subspace of g: the vectors annihilated by every S_i.
/// An empty family has full kernel.
template <class S>
Mat<S> cocycle_kernel(const CocycleData<S>& om) {
  const int q = om.g_dim;
  if (om.s_ops.empty()) return Mat<S>::identity(q);
  Mat<S> stacked(q * om.p(), q);
  for (int i = 0; i < om.p(); ++i)
    for (int r = 0; r < q; ++r)
      for (int c = 0; c < q; ++c) stacked(i * q + r, c) = om.s_ops[i](r, c);
  return kernel(stacked);
}

/// Whether Z(g) meets ker omega only in 0. When this holds, the center of the
/// extended algebra is exactly the adjoined value space.
template <class S>
bool rigidity_holds(const MetricLieAlgebra<S>& g, const CocycleData<S>& om) {
  Mat<S> zk = span_intersection(center(g), cocycle_kernel(om));
  return zk.cols() == 0;
}

template <class S>
struct ExtensionResult {
  MetricLieAlgebra<S> algebra;
  bool rigid = false;  ///< Z(g) and ker omega intersect trivially
};

/// Extends g by its cocycle: dimension grows by p, the metric becomes
/// blockdiag(g, z_metric), and [u, v] picks up the central component
/// omega(u, v). The adjoined coordinates are central by construction.
template <class S>
ExtensionResult<S> central_extension(const MetricLieAlgebra<S>& g, const CocycleData<S>& om,
                                     const Mat<S>& z_metric, double tol = kDefaultTol) {
  const int q = g.n;
  const int p = om.p();
  if (om.g_dim != q) throw ValidationError("cocycle dimension does not match the algebra");
  if (z_metric.rows() != p || z_metric.cols() != p)
    throw ValidationError("value-space metric has the wrong shape");
  for (const auto& s : om.s_ops)
    if (s.rows() != q || s.cols() != q)
      throw ValidationError("cocycle operator has the wrong shape");
  if (p > 0) {
    Signature sig = signature(z_metric, tol);
    if (sig.negative != 0) throw NonEuclideanCenter("value-space metric is not positive definite");
  }
  double scale = 1.0;
  for (const auto& s : om.s_ops) scale = std::max(scale, s.norm_inf());
  if (cocycle_skewness_residual(g.metric, om) > (is_exact_v<S> ? 0.0 : tol * scale))
    throw ValidationError("cocycle operators are not metric-skew");
  if (cocycle_residual(g, om) > (is_exact_v<S> ? 0.0 : tol * scale * scale))
    throw NotACocycle("cocycle identity fails");

  ExtensionResult<S> out{MetricLieAlgebra<S>(q + p, block_diag(g.metric, z_metric)),
                         rigidity_holds(g, om)};
  auto w = cocycle_forms(g.metric, om);
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) {
      const auto& gc = g.c[g.pair_index(a, b)];
      for (int k = 0; k < q; ++k)
        if (!(gc[k] == S(0))) out.algebra.add_bracket(a, b, k, gc[k]);
      for (int i = 0; i < p; ++i)
        if (!(w[i](a, b) == S(0))) out.algebra.add_bracket(a, b, q + i, w[i](a, b));
    }
  return out;
}

/// The data recovered by splitting an algebra orthogonally along its center:
/// the complementary subalgebra g with restricted metric, the Gram matrix of
/// the chosen center basis, the cocycle giving the central bracket component,
/// and the basis columns embedding both factors back into the original
/// coordinates.
template <class S>
struct AttributeTriple {
  MetricLieAlgebra<S> g;
  Mat<S> z_metric;   ///< Gram of the chosen center basis (diagonal; identity when normalizable)
  CocycleData<S> omega;
  Mat<S> embedding;  ///< columns: images of the g basis, then the center basis
  bool rigid = false;
};

namespace detail {

/// Gram-Schmidt against a positive definite restricted form, processed in
/// column order (deterministic). Vectors are normalized when the needed
/// square roots exist in the scalar type; otherwise they are left orthogonal
/// with their squared lengths reported in the Gram.
template <class S>
std::pair<Mat<S>, Mat<S>> orthogonalize_euclidean(const Mat<S>& g_metric, const Mat<S>& cols) {
  const int p = cols.cols();
  std::vector<std::vector<S>> built;
  std::vector<S> norms;
  for (int i = 0; i < p; ++i) {
    std::vector<S> v = cols.col(i);
    for (int k = 0; k < static_cast<int>(built.size()); ++k) {
      S coef = dot_g(g_metric, v, built[k]) / norms[k];
      for (int r = 0; r < static_cast<int>(v.size()); ++r) v[r] -= coef * built[k][r];
    }
    S nn = dot_g(g_metric, v, v);
    built.push_back(std::move(v));
    norms.push_back(std::move(nn));
  }
  bool normalizable = true;
  std::vector<S> scale(p, S(1));
  for (int i = 0; i < p; ++i) {
    if constexpr (is_exact_v<S>) {
      auto root = try_exact_sqrt(norms[i]);
      if (!root) {
        normalizable = false;
        break;
      }
      scale[i] = *root;
    } else {
      scale[i] = std::sqrt(to_double(norms[i]));
    }
  }
  Mat<S> basis(cols.rows(), p);
  Mat<S> gramz(p, p);
  for (int i = 0; i < p; ++i) {
    for (int r = 0; r < cols.rows(); ++r)
      basis(r, i) = normalizable ? built[i][r] / scale[i] : built[i][r];
    gramz(i, i) = normalizable ? S(1) : norms[i];
  }
  return {std::move(basis), std::move(gramz)};
}

}  // namespace detail

/// Splits h = g (+) Z(h) orthogonally along a nondegenerate Euclidean center
/// and extracts the induced bracket on g together with the cocycle recording
/// the central component of the original bracket.
template <class S>
AttributeTriple<S> decompose(const MetricLieAlgebra<S>& h, double tol = kDefaultTol) {
  Mat<S> zc = center(h);
  const int p = zc.cols();
  const int q = h.n - p;

  Mat<S> zgram = gram(h.metric, zc);
  if (p > 0) {
    if (is_degenerate_form(zgram, tol)) throw DegenerateCenter("center is degenerate");
    Signature sig;
    try {
      sig = signature(zgram, tol);
    } catch (const DegenerateMetric&) {
      throw DegenerateCenter("center is degenerate");
    }
    if (sig.negative != 0) throw NonEuclideanCenter("center is not Euclidean");
  }

  auto [zbasis, z_metric] = detail::orthogonalize_euclidean(h.metric, zc);
  ComplementResult<S> comp = orthogonal_complement(h.metric, zbasis);
  if (comp.degenerate || comp.complement.cols() != q)
    throw DegenerateCenter("center admits no orthogonal complement");

  Mat<S> t = hcat(comp.complement, zbasis);
  auto t_inv_opt = try_solve(t, Mat<S>::identity(h.n));
  if (!t_inv_opt) throw DegenerateCenter("adapted basis is singular");
  const Mat<S>& t_inv = *t_inv_opt;

  AttributeTriple<S> out;
  out.g = MetricLieAlgebra<S>(q, gram(h.metric, comp.complement));
  out.z_metric = std::move(z_metric);
  out.omega.g_dim = q;
  std::vector<Mat<S>> w(p, Mat<S>(q, q));
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b) {
      auto coords = mat_vec(t_inv, h.bracket(t.col(a), t.col(b)));
      for (int k = 0; k < q; ++k)
        if (!(coords[k] == S(0))) out.g.add_bracket(a, b, k, coords[k]);
      for (int i = 0; i < p; ++i) {
        w[i](a, b) = coords[q + i];
        w[i](b, a) = -coords[q + i];
      }
    }
  Mat<S> g_inv = inverse(out.g.metric);
  for (int i = 0; i < p; ++i) out.omega.s_ops.push_back(-(g_inv * w[i]));

  double scale = std::max(1.0, h.metric.norm_inf());
  for (const auto& s : out.omega.s_ops) scale = std::max(scale, s.norm_inf());
  if (cocycle_residual(out.g, out.omega) > (is_exact_v<S> ? 0.0 : tol * scale * scale))
    throw NotACocycle("extracted central component fails the cocycle identity");

  out.embedding = std::move(t);
  out.rigid = rigidity_holds(out.g, out.omega);
  return out;
}

/// Operators S_x for x running over the chosen value-space basis under a
/// general Gram Z: S_{z_j} = sum_i Z(i, j) S_i. With an orthonormal basis
/// this is the stored family itself.
template <class S>
std::vector<Mat<S>> sx_family(const CocycleData<S>& om, const Mat<S>& z_metric) {
  std::vector<Mat<S>> out;
  out.reserve(om.s_ops.size());
  for (int j = 0; j < om.p(); ++j) {
    Mat<S> sx(om.g_dim, om.g_dim);
    for (int i = 0; i < om.p(); ++i) {
      if (z_metric(i, j) == S(0)) continue;
      sx = sx + z_metric(i, j) * om.s_ops[i];
    }
    out.push_back(std::move(sx));
  }
  return out;
}

/// Re-expresses the family against an orthonormalized value-space basis, so
/// the operators match the normalization the block extraction expects. In
/// exact mode this may require square roots and throw InexactSqrt.
template <class S>
std::vector<Mat<S>> orthonormal_s_family(const CocycleData<S>& om, const Mat<S>& z_metric) {
  const int p = om.p();
  if (p == 0) return {};
  OrthoBasis<S> ob = pseudo_orthonormalize(z_metric, Mat<S>::identity(p));
  for (int sgn : ob.signs)
    if (sgn < 0) throw NonEuclideanCenter("value-space metric is not positive definite");
  Mat<S> b_inv = inverse(ob.basis);
  std::vector<Mat<S>> out;
  out.reserve(p);
  for (int j = 0; j < p; ++j) {
    Mat<S> sj(om.g_dim, om.g_dim);
    for (int i = 0; i < p; ++i) {
      if (b_inv(j, i) == S(0)) continue;
      sj = sj + b_inv(j, i) * om.s_ops[i];
    }
    out.push_back(std::move(sj));
  }
  return out;
}

/// D in product form, D = -sum_{i,j} Z(i,j) S_i S_j. Symmetric for the
/// g-metric whenever the S_i are metric-skew.
template <class S>
Mat<S> d_operator_product(const CocycleData<S>& om, const Mat<S>& z_metric) {
  Mat<S> d(om.g_dim, om.g_dim);
  for (int i = 0; i < om.p(); ++i)
    for (int j = 0; j < om.p(); ++j) {
      if (z_metric(i, j) == S(0)) continue;
      d = d + (-z_metric(i, j)) * (om.s_ops[i] * om.s_ops[j]);
    }
  return d;
}

/// D from its defining traces, <D u, v>_g = tr(omega_u^* omega_v), assembled
/// independently of the product form.
template <class S>
Mat<S> d_operator_trace(const Mat<S>& g_metric, const CocycleData<S>& om, const Mat<S>& z_metric) {
  const int q = om.g_dim;
  const int p = om.p();
  Mat<S> g_inv = inverse(g_metric);
  // omega_{e_a} has matrix rows (S_i e_a)^T G; its adjoint is G^{-1} M_a^T Z.
  std::vector<Mat<S>> m(p > 0 ? q : 0, Mat<S>(p, q));
  for (int a = 0; a < q && p > 0; ++a)
    for (int i = 0; i < p; ++i) {
      std::vector<S> col = om.s_ops[i].col(a);
      auto row = mat_vec(g_metric, col);
      for (int c = 0; c < q; ++c) m[a](i, c) = row[c];
    }
  Mat<S> form(q, q);
  for (int a = 0; a < q && p > 0; ++a) {
    Mat<S> left = g_inv * m[a].transposed() * z_metric;
    for (int b = a; b < q; ++b) {
      S val = (left * m[b]).trace();
      form(a, b) = val;
      form(b, a) = val;
    }
  }
  return g_inv * form;
}

/// J_u for every basis vector u of g: J_{e_a}(v) = ad_v^*(e_a).
template <class S>
std::vector<Mat<S>> ju_family(const MetricLieAlgebra<S>& g) {
  const int q = g.n;
  Mat<S> g_inv = inverse(g.metric);
  std::vector<Mat<S>> ad_stars;
  ad_stars.reserve(q);
  for (int b = 0; b < q; ++b) ad_stars.push_back(metric_adjoint(g.metric, g_inv, g.ad(b)));
  std::vector<Mat<S>> out;
  out.reserve(q);
  for (int a = 0; a < q; ++a) {
    Mat<S> j(q, q);
    for (int b = 0; b < q; ++b)
      for (int k = 0; k < q; ++k) j(k, b) = ad_stars[b](k, a);
    out.push_back(std::move(j));
  }
  return out;
}

/// Ricci of the extended algebra assembled blockwise from the split data:
/// the g-block from ric_g and D, the center block from the S_x traces, and
/// the mixed block from tr(J_u S_x). Must agree with computing Ricci on the
/// extension directly.
template <class S>
CurvatureReport<S> ricci_via_attributes(const AttributeTriple<S>& t) {
  const int q = t.g.n;
  const int p = t.omega.p();
  const int n = q + p;
  S quarter = S(1) / scalar_from_int<S>(4);
  S half = S(1) / scalar_from_int<S>(2);

  CurvatureReport<S> base = ricci_general(t.g);
  Mat<S> d = d_operator_product(t.omega, t.z_metric);
  Mat<S> gg = base.ric - half * (t.g.metric * d);

  auto sx = sx_family(t.omega, t.z_metric);
  auto ju = ju_family(t.g);
  Mat<S> ric(n, n);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) ric(a, b) = gg(a, b);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) ric(q + i, q + j) = -quarter * (sx[i] * sx[j]).trace();
  for (int a = 0; a < q; ++a)
    for (int j = 0; j < p; ++j) {
      S val = -quarter * (ju[a] * sx[j]).trace();
      ric(a, q + j) = val;
      ric(q + j, a) = val;
    }

  MetricLieAlgebra<S> shell(n, block_diag(t.g.metric, t.z_metric));
  return finish_report(shell, std::move(ric), inverse(shell.metric));
}

/// Residuals of the three split Einstein conditions at a given constant:
///   ric_g(u,v) = lambda <u,v> + 1/2 tr(omega_u^* omega_v)   (g block),
///   tr(J_u S_x) = 0                                         (mixed block),
///   tr(S_x S_y) = -4 lambda <x,y>_z                          (center block).
/// All three vanish exactly when the extension is lambda-Einstein.
struct SplitResiduals {
  double g_block = 0.0;
  double mixed_block = 0.0;
  double center_block = 0.0;

  double worst() const { return std::max(g_block, std::max(mixed_block, center_block)); }
};

template <class S>
SplitResiduals einstein_split_residuals(const AttributeTriple<S>& t, const S& lambda) {
  const int q = t.g.n;
  const int p = t.omega.p();
  S half = S(1) / scalar_from_int<S>(2);
  S four = scalar_from_int<S>(4);

  CurvatureReport<S> base = ricci_general(t.g);
  Mat<S> d = d_operator_product(t.omega, t.z_metric);
  Mat<S> g_gap = base.ric_op - lambda * Mat<S>::identity(q) - half * d;

  auto sx = sx_family(t.omega, t.z_metric);
  auto ju = ju_family(t.g);
  SplitResiduals r;
  r.g_block = g_gap.norm_inf();
  for (int a = 0; a < q; ++a)
    for (int j = 0; j < p; ++j)
      r.mixed_block = std::max(r.mixed_block, std::abs(to_double((ju[a] * sx[j]).trace())));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      S gap = (sx[i] * sx[j]).trace() + four * lambda * t.z_metric(i, j);
      r.center_block = std::max(r.center_block, std::abs(to_double(gap)));
    }
  return r;
}

template <class S>
struct QuasiEinsteinVerdict {
  bool passed = false;
  int type = 0;              ///< dimension of the cocycle value space
  S lambda = S(0);
  double ricci_residual = 0.0;   ///< |Ric_g - lambda Id - 1/2 D|
  double center_residual = 0.0;  ///< |tr(S_x S_y) + 4 lambda <x,y>_z|
  bool rigid = false;            ///< ker omega meets Z(g) trivially
};

/// Checks Ric_g = lambda Id + 1/2 D together with the S-trace condition and
/// the trivial-intersection requirement on ker omega. Note there is no mixed
/// condition here: that one belongs to the full Einstein split.
template <class S>
QuasiEinsteinVerdict<S> quasi_einstein_check(const MetricLieAlgebra<S>& g, const CocycleData<S>& om,
                                             const Mat<S>& z_metric, const S& lambda,
                                             double tol = kDefaultTol) {
  const int q = g.n;
  S half = S(1) / scalar_from_int<S>(2);
  S four = scalar_from_int<S>(4);
  QuasiEinsteinVerdict<S> v;
  v.type = om.p();
  v.lambda = lambda;

  CurvatureReport<S> base = ricci_general(g);
  Mat<S> d = d_operator_product(om, z_metric);
  v.ricci_residual = (base.ric_op - lambda * Mat<S>::identity(q) - half * d).norm_inf();

  auto sx = sx_family(om, z_metric);
  for (int i = 0; i < om.p(); ++i)
    for (int j = 0; j < om.p(); ++j) {
      S gap = (sx[i] * sx[j]).trace() + four * lambda * z_metric(i, j);
      v.center_residual = std::max(v.center_residual, std::abs(to_double(gap)));
    }
  v.rigid = rigidity_holds(g, om);

  double scale = std::max(1.0, base.ric_op.norm_inf());
  v.passed = v.rigid && v.ricci_residual <= tol * scale && v.center_residual <= tol * scale;
  return v;
}

/// Residual of the invariance condition
///   omega(ad_u^* v, w) + omega(v, ad_u^* w) = 0 for all u, v, w,
/// together with how far D is from being a derivation of g. When the first
/// residual vanishes the second must too.
struct InvarianceReport {
  double invariance_residual = 0.0;
  double derivation_residual = 0.0;
};

template <class S>
InvarianceReport invariance_and_derivation(const AttributeTriple<S>& t) {
  const int q = t.g.n;
  Mat<S> g_inv = inverse(t.g.metric);
  auto w = cocycle_forms(t.g.metric, t.omega);
  InvarianceReport rep;
  for (int a = 0; a < q; ++a) {
    Mat<S> ad_star = metric_adjoint(t.g.metric, g_inv, t.g.ad(a));
    for (const auto& wi : w) {
      Mat<S> gap = ad_star.transposed() * wi + wi * ad_star;
      rep.invariance_residual = std::max(rep.invariance_residual, gap.norm_inf());
    }
  }
  rep.derivation_residual = derivation_residual(t.g, d_operator_product(t.omega, t.z_metric));
  return rep;
}

/// Best linear alpha : g -> R^p with omega = -alpha([.,.]), solved in the
/// least-squares sense. A small residual exhibits omega as a coboundary.
template <class S>
struct CoboundaryFit {
  Mat<S> alpha;          ///< p x q coefficient matrix
  double residual = 0.0; ///< worst equation defect at the fitted alpha
  bool exact = false;    ///< residual within tolerance
};

template <class S>
CoboundaryFit<S> coboundary_fit(const AttributeTriple<S>& t, double tol = kDefaultTol) {
  const int q = t.g.n;
  const int p = t.omega.p();
  CoboundaryFit<S> fit;
  fit.alpha = Mat<S>(p, q);
  const int pairs = q * (q - 1) / 2;
  Mat<S> design(pairs, q);
  auto w = cocycle_forms(t.g.metric, t.omega);
  Mat<S> rhs(pairs, p);
  int row = 0;
  for (int a = 0; a < q; ++a)
    for (int b = a + 1; b < q; ++b, ++row) {
      auto br = t.g.bracket_basis(a, b);
      for (int k = 0; k < q; ++k) design(row, k) = br[k];
      for (int i = 0; i < p; ++i) rhs(row, i) = -w[i](a, b);
    }
  if constexpr (is_exact_v<S>) {
    // Normal equations are always consistent; free variables pinned to zero.
    Mat<S> lhs = design.transposed() * design;
    Mat<S> prhs = design.transposed() * rhs;
    Rref<S> r = rref(hcat(lhs, prhs));
    for (int rr = 0; rr < r.rank; ++rr) {
      int pc = r.pivot_cols[rr];
      if (pc >= q) continue;
      for (int i = 0; i < p; ++i) fit.alpha(i, pc) = r.mat(rr, q + i);
    }
  } else {
    for (int i = 0; i < p; ++i) {
      std::vector<S> b(pairs, S(0));
      for (int rr = 0; rr < pairs; ++rr) b[rr] = rhs(rr, i);
      auto x = lsq_solve(design, b);
      for (int k = 0; k < q; ++k) fit.alpha(i, k) = x[k];
    }
  }
  Mat<S> back = design * fit.alpha.transposed();  // pairs x p
  fit.residual = (back - rhs).norm_inf();
  fit.exact = fit.residual <= tol;
  return fit;
}

/// Block data of a two-step base with Lorentzian derived ideal: the structure
/// endomorphisms restricted to the Euclidean complement, and the cocycle
/// operators split along derived ideal vs complement.
template <class S>
struct ThreeStepBlocks {
  int s = 0;  ///< dim of the derived ideal of g
  int m = 0;  ///< dim of its orthogonal complement in g
  int p = 0;  ///< dim of the cocycle value space
  std::vector<Mat<S>> j_ops;  ///< m x m restrictions, first index timelike
  std::vector<Mat<S>> b_ops;  ///< m x s maps derived -> complement
  std::vector<Mat<S>> d_ops;  ///< m x m skew parts on the complement
  double block_residual = 0.0;    ///< defect of the expected block shape
  double eq_complement = 0.0;     ///< first equation, on the complement
  double eq_derived = 0.0;        ///< second equation, on the derived ideal
  double eq_center = 0.0;         ///< third equation, trace pairings
  double trace_identity = 0.0;    ///< sum tr(D_i^2) + 4 (2s + m + 3p) lambda
};

/// Extracts the blocks and evaluates the three coupled equations equivalent
/// to the split Einstein conditions for a 3-step extension, at the supplied
/// constant. Requires g at most 2-step with Z(g) = [g, g] nondegenerate
/// Lorentzian.
template <class S>
ThreeStepBlocks<S> three_step_blocks(const AttributeTriple<S>& t, const S& lambda,
                                     double tol = kDefaultTol) {
  const MetricLieAlgebra<S>& g = t.g;
  int cls = nilpotency_class(g);
  if (cls > 2) throw WrongNilpotencyClass("base algebra is not 2-step nilpotent");

  Mat<S> derived = derived_ideal(g);
  ThreeStepBlocks<S> out;
  out.s = derived.cols();
  out.m = g.n - out.s;
  out.p = t.omega.p();

  Mat<S> e_cols(g.n, 0), v_cols(g.n, 0);
  std::vector<int> e_signs;
  if (out.s > 0) {
    if (!same_span(center(g), derived))
      throw HypothesisViolated("Z(g) differs from the derived ideal");
    Mat<S> dgram = gram(g.metric, derived);
    if (is_degenerate_form(dgram, tol)) throw DegenerateDerived("derived ideal is degenerate");
    OrthoBasis<S> ob = pseudo_orthonormalize(g.metric, derived);
    int negs = 0;
    for (int sgn : ob.signs) negs += sgn < 0 ? 1 : 0;
    if (negs != 1) throw HypothesisViolated("derived ideal is not Lorentzian");
    e_cols = ob.basis;
    e_signs = ob.signs;
  }
  if (out.m > 0) {
    ComplementResult<S> comp =
        out.s > 0 ? orthogonal_complement(g.metric, e_cols)
                  : ComplementResult<S>{Mat<S>::identity(g.n), false};
    if (comp.degenerate) throw DegenerateDerived("derived complement is degenerate");
    OrthoBasis<S> ob = pseudo_orthonormalize(g.metric, comp.complement);
    for (int sgn : ob.signs)
      if (sgn < 0) throw HypothesisViolated("derived complement is not Euclidean");
    v_cols = ob.basis;
  }

  std::vector<Mat<S>> j_full =
      out.s > 0 ? structure_endos(g, e_cols) : std::vector<Mat<S>>{};
  for (const auto& jf : j_full) {
    Mat<S> restr(out.m, out.m);
    Mat<S> gv = g.metric * v_cols;
    restr = gv.transposed() * jf * v_cols;
    out.j_ops.push_back(std::move(restr));
  }

  auto s_orth = orthonormal_s_family(t.omega, t.z_metric);
  Mat<S> qmat = hcat(e_cols, v_cols);
  std::vector<int> signs = e_signs;
  for (int i = 0; i < out.m; ++i) signs.push_back(1);
  Mat<S> q_inv = qmat.transposed() * g.metric;
  for (int r = 0; r < g.n; ++r)
    if (signs[r] < 0)
      for (int c = 0; c < g.n; ++c) q_inv(r, c) = -q_inv(r, c);

  Mat<S> eta(out.s, out.s);
  for (int i = 0; i < out.s; ++i) eta(i, i) = S(e_signs[i]);
  for (const auto& sop : s_orth) {
    Mat<S> hat = q_inv * sop * qmat;
    Mat<S> top_left(out.s, out.s), top_right(out.s, out.m);
    Mat<S> bottom_left(out.m, out.s), bottom_right(out.m, out.m);
    for (int r = 0; r < out.s; ++r) {
      for (int c = 0; c < out.s; ++c) top_left(r, c) = hat(r, c);
      for (int c = 0; c < out.m; ++c) top_right(r, c) = hat(r, out.s + c);
    }
    for (int r = 0; r < out.m; ++r) {
      for (int c = 0; c < out.s; ++c) bottom_left(r, c) = hat(out.s + r, c);
      for (int c = 0; c < out.m; ++c) bottom_right(r, c) = hat(out.s + r, out.s + c);
    }
    out.block_residual = std::max(out.block_residual, top_left.norm_inf());
    Mat<S> adj_gap = top_right + eta * bottom_left.transposed();
    out.block_residual = std::max(out.block_residual, adj_gap.norm_inf());
    Mat<S> skew_gap = bottom_right + bottom_right.transposed();
    out.block_residual = std::max(out.block_residual, skew_gap.norm_inf());
    out.b_ops.push_back(std::move(bottom_left));
    out.d_ops.push_back(std::move(bottom_right));
  }

  S half = S(1) / scalar_from_int<S>(2);
  S four = scalar_from_int<S>(4);

  // First equation, on the complement.
  if (out.m > 0) {
    Mat<S> lhs(out.m, out.m);
    for (int i = 0; i < out.s; ++i) {
      Mat<S> sq = out.j_ops[i] * out.j_ops[i];
      lhs = (i == 0) ? lhs - half * sq : lhs + half * sq;
    }
    for (int i = 0; i < out.p; ++i) {
      Mat<S> bstar = eta * out.b_ops[i].transposed();  // s x m
      lhs = lhs + half * (out.d_ops[i] * out.d_ops[i] - out.b_ops[i] * bstar);
    }
    out.eq_complement = (lhs - lambda * Mat<S>::identity(out.m)).norm_inf();
  }

  // Second equation, on the derived ideal.
  if (out.s > 0) {
    Mat<S> tmat(out.s, out.s);
    for (int j = 0; j < out.s; ++j)
      for (int l = 0; l < out.s; ++l)
        tmat(j, l) = S(e_signs[l]) * (out.j_ops[l] * out.j_ops[j]).trace();
    for (int i = 0; i < out.p; ++i) {
      Mat<S> bstar = eta * out.b_ops[i].transposed();
      tmat = tmat + scalar_from_int<S>(2) * (bstar * out.b_ops[i]);
    }
    out.eq_derived = (tmat + four * lambda * Mat<S>::identity(out.s)).norm_inf();
  }

  // Third equation plus the summed trace identity.
  S d_trace_sum(0);
  for (int i = 0; i < out.p; ++i) {
    for (int j = 0; j < out.p; ++j) {
      Mat<S> bstar_i = eta * out.b_ops[i].transposed();
      S gap = (out.d_ops[i] * out.d_ops[j]).trace() -
              scalar_from_int<S>(2) * (bstar_i * out.b_ops[j]).trace() +
              (i == j ? four * lambda : S(0));
      out.eq_center = std::max(out.eq_center, std::abs(to_double(gap)));
    }
    d_trace_sum += (out.d_ops[i] * out.d_ops[i]).trace();
  }
  S count = scalar_from_int<S>(2 * out.s + out.m + 3 * out.p);
  out.trace_identity = std::abs(to_double(d_trace_sum + four * count * lambda));
  return out;
}

} // namespace nilcurv
