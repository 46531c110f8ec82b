#pragma once

#include <cstdint>
#include <vector>

#include "nilcurv/errors.hpp"
#include "nilcurv/matrix.hpp"
#include "nilcurv/numeric.hpp"
#include "nilcurv/scalar.hpp"

namespace nilcurv {

/// A family of skew-symmetric m x m matrices (Euclidean sense, M + M^T = 0).
struct SkewFamily {
  int m = 0;
  std::vector<Mat<double>> mats;
};

/// Worst |M_i + M_i^T| entry across the family.
double skew_family_residual(const SkewFamily& f);

/// Two-sided eigenvalue perturbation bounds: for symmetric A, B and 1-based
/// index k (ascending eigenvalues),
///   lam_k(A) + lam_1(B) <= lam_k(A+B) <= lam_k(A) + lam_m(B).
struct WeylBounds {
  double lower = 0.0;
  double mid = 0.0;
  double upper = 0.0;
};

WeylBounds weyl_bounds(const Mat<double>& a, const Mat<double>& b, int k);

/// Randomized stress of the bounds across dimensions and all indices.
struct WeylFuzzReport {
  int pairs = 0;
  int checks = 0;
  double worst_violation = 0.0;  ///< max(lower - mid, mid - upper) observed
  bool passed = false;
};

WeylFuzzReport weyl_fuzz(int pairs, std::uint64_t seed, int min_dim = 2, int max_dim = 8,
                         double tol = 1e-10);

/// Verifier for the skew-family diagonal identity: given M_1..M_n skew and
/// nonpositive v_1..v_{m-n}, the hypothesis is
///   M_1^2 - sum_{l=2}^n M_l^2
///     = Diag(-1/2 tr(M_1^2), 1/2 tr(M_2^2), ..., 1/2 tr(M_n^2), v_1..v_{m-n}).
/// When it holds, the implementation asserts the consequences: v = 0,
/// rank(M_i) <= 2 for i >= 2, and additivity of the smallest eigenvalue,
///   lam_1(sum_{l=2}^n M_l^2) = sum_{l=2}^n lam_1(M_l^2).
/// A conclusion failing while the hypothesis holds would expose a bug in this
/// implementation and is reported, never silently repaired.
struct SkewDiagReport {
  double skew_residual = 0.0;
  double hypothesis_residual = 0.0;
  bool hypothesis_holds = false;
  double v_max_abs = 0.0;
  std::vector<int> ranks;  ///< ranks of M_2..M_n
  bool ranks_ok = false;
  double additivity_gap = 0.0;
  bool conclusions_hold = false;  ///< meaningful only when hypothesis_holds
};

SkewDiagReport skew_diag_family_verify(const SkewFamily& f, const std::vector<double>& v,
                                       double tol = 1e-9);

/// Constructive adapted basis for rank-2 skew families: given K_1..K_n skew
/// with rank(K_i) = 2, tr(K_i K_j) = 0 for i != j, and additivity of the
/// smallest eigenvalue of sum K_i^2, builds an orthonormal basis
/// (u_0, u_1..u_n, v_1..v_{m-n-1}) with
///   K_i(u_0) = alpha_i u_i, K_i(u_j) = -delta_ij alpha_i u_0, K_i(v_l) = 0,
/// where u_0 is a unit eigenvector for the smallest eigenvalue of sum K_i^2
/// and u_i = K_i u_0 / |K_i u_0|.
struct Rank2Basis {
  Mat<double> basis;  ///< columns (u_0, u_1..u_n, v_1..v_{m-n-1})
  int n = 0;
  std::vector<double> alphas;
  double gram_residual = 0.0;    ///< |B^T B - Id|
  double action_residual = 0.0;  ///< worst defect of the stated K_i action
};

Rank2Basis rank2_adapted_basis(const std::vector<Mat<double>>& ks, double tol = 1e-8);

/// The K/A/P system on R^{2k}:
///   K^2 = P^{-1} A P + A,
///   alpha K = A P - P^{-1} A,
/// with K skew invertible, P orthogonal, A = diag(-alpha_i^2) (alpha_i != 0),
/// alpha = +-sqrt(sum alpha_i^2). Solvable only for k = 1.
template <class S>
struct KapTriple {
  Mat<S> k_mat;
  Mat<S> a_diag;
  Mat<S> p_mat;
  S alpha = S(0);
};

/// Max entrywise residual of the two equations; P must be orthogonal (its
/// inverse is taken as the transpose).
template <class S>
double kap_residual(const KapTriple<S>& t) {
  const Mat<S>& k = t.k_mat;
  const Mat<S>& a = t.a_diag;
  const Mat<S>& p = t.p_mat;
  Mat<S> p_inv = p.transposed();
  Mat<S> eq1 = k * k - p_inv * a * p - a;
  Mat<S> eq2 = t.alpha * k - a * p + p_inv * a;
  return std::max(eq1.norm_inf(), eq2.norm_inf());
}

/// The explicit k = 1 solution:
///   A = diag(-a1^2, -a2^2), K = eps*ah*[[0,1],[-1,0]],
///   P = sigma*eps*[[0,-1],[1,0]], alpha = sigma*ah, ah = sqrt(a1^2 + a2^2),
/// for eps, sigma in {+1,-1}. In exact mode a1^2 + a2^2 must be a perfect
/// square.
template <class S>
KapTriple<S> kap_closed_form(const S& a1, const S& a2, int eps, int alpha_sign) {
  if (a1 == S(0) || a2 == S(0)) throw ZeroParameter("alpha entries must be nonzero");
  if ((eps != 1 && eps != -1) || (alpha_sign != 1 && alpha_sign != -1))
    throw ParameterOutOfRange("eps and alpha_sign must be +1 or -1");
  S e = scalar_from_int<S>(eps);
  S s = scalar_from_int<S>(alpha_sign);
  S rad = a1 * a1 + a2 * a2;
  S ah = exact_sqrt(rad);
  KapTriple<S> t;
  t.k_mat = Mat<S>(2, 2);
  t.k_mat(0, 1) = e * ah;
  t.k_mat(1, 0) = -(e * ah);
  t.a_diag = Mat<S>(2, 2);
  t.a_diag(0, 0) = -(a1 * a1);
  t.a_diag(1, 1) = -(a2 * a2);
  t.p_mat = Mat<S>(2, 2);
  t.p_mat(0, 1) = -(s * e);
  t.p_mat(1, 0) = s * e;
  t.alpha = s * ah;
  return t;
}

/// Restarted simplex search for K/A/P solutions at a given k. Both equations
/// are homogeneous under (K, alpha_i) -> (c K, c alpha_i), so the search fixes
/// sum(alpha_i^2) = 1 (hence alpha = +-1) without losing solutions and keeps
/// every share alpha_i^2 >= min(0.01, 1/(4k)) so A stays negative definite;
/// otherwise the minimizer escapes to the invalid collapse K -> 0, A -> 0.
/// K is parameterized by its strict upper triangle, the shares by a softmax,
/// P = exp(skew) optionally composed with a reflection; the alpha sign and the
/// reflection branch are cycled by restart index. For k = 1 the search must
/// reach ~1e-8; for k >= 2 the floor reached is empirical evidence of
/// unsolvability, not a proof.
struct KapSearchResult {
  int k = 0;
  int restarts = 0;
  std::uint64_t seed = 0;
  double best_residual = 0.0;  ///< kap_residual re-evaluated at the best triple
  KapTriple<double> best;
  int best_restart = -1;
  long total_evals = 0;
};

KapSearchResult kap_search(int k, int restarts, std::uint64_t seed);

} // namespace nilcurv
