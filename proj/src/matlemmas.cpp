#include "nilcurv/matlemmas.hpp"

#include <cmath>
#include <limits>

#include "nilcurv/optimize.hpp"
#include "nilcurv/parallel.hpp"
#include "nilcurv/rng.hpp"

namespace nilcurv {

double skew_family_residual(const SkewFamily& f) {
  double worst = 0.0;
  for (const auto& m : f.mats) worst = std::max(worst, (m + m.transposed()).norm_inf());
  return worst;
}

WeylBounds weyl_bounds(const Mat<double>& a, const Mat<double>& b, int k) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw SizeMismatch("weyl_bounds needs two square matrices of equal size");
  const int m = a.rows();
  if (k < 1 || k > m) throw SizeMismatch("eigenvalue index out of range");
  auto ea = sym_eigenvalues(a);
  auto eb = sym_eigenvalues(b);
  auto es = sym_eigenvalues(a + b);
  WeylBounds out;
  out.lower = ea[k - 1] + eb[0];
  out.mid = es[k - 1];
  out.upper = ea[k - 1] + eb[m - 1];
  return out;
}

WeylFuzzReport weyl_fuzz(int pairs, std::uint64_t seed, int min_dim, int max_dim, double tol) {
  WeylFuzzReport rep;
  rep.pairs = pairs;
  SplitMix64 rng = substream(seed, 0);
  for (int t = 0; t < pairs; ++t) {
    int m = rng.uniform_int(min_dim, max_dim);
    Mat<double> a(m, m), b(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        a(i, j) = a(j, i) = rng.uniform(-5.0, 5.0);
        b(i, j) = b(j, i) = rng.uniform(-5.0, 5.0);
      }
    for (int k = 1; k <= m; ++k) {
      WeylBounds w = weyl_bounds(a, b, k);
      rep.worst_violation =
          std::max({rep.worst_violation, w.lower - w.mid, w.mid - w.upper});
      ++rep.checks;
    }
  }
  rep.passed = rep.worst_violation <= tol;
  return rep;
}

SkewDiagReport skew_diag_family_verify(const SkewFamily& f, const std::vector<double>& v,
                                       double tol) {
  const int n = static_cast<int>(f.mats.size());
  const int m = f.m;
  if (n < 2 || n > m) throw SizeMismatch("need 2 <= n <= m skew matrices");
  if (static_cast<int>(v.size()) != m - n) throw SizeMismatch("v must have m - n entries");
  for (const auto& mat : f.mats)
    if (mat.rows() != m || mat.cols() != m) throw SizeMismatch("family matrices must be m x m");

  SkewDiagReport rep;
  rep.skew_residual = skew_family_residual(f);

  double scale = 1.0;
  for (const auto& mat : f.mats) scale = std::max(scale, mat.norm_inf());
  scale = std::max(1.0, scale * scale);

  Mat<double> lhs = f.mats[0] * f.mats[0];
  Mat<double> sum_rest(m, m);
  for (int l = 1; l < n; ++l) sum_rest = sum_rest + f.mats[l] * f.mats[l];
  lhs = lhs - sum_rest;

  Mat<double> rhs(m, m);
  rhs(0, 0) = -0.5 * (f.mats[0] * f.mats[0]).trace();
  for (int l = 1; l < n; ++l) rhs(l, l) = 0.5 * (f.mats[l] * f.mats[l]).trace();
  for (int i = n; i < m; ++i) rhs(i, i) = v[i - n];

  rep.hypothesis_residual = (lhs - rhs).norm_inf();
  bool v_nonpositive = true;
  for (double x : v)
    if (x > tol * scale) v_nonpositive = false;
  rep.hypothesis_holds = rep.skew_residual <= tol * scale &&
                         rep.hypothesis_residual <= tol * scale && v_nonpositive;

  for (double x : v) rep.v_max_abs = std::max(rep.v_max_abs, std::abs(x));
  rep.ranks_ok = true;
  for (int l = 1; l < n; ++l) {
    int r = rank_of(f.mats[l]);
    rep.ranks.push_back(r);
    if (r > 2) rep.ranks_ok = false;
  }
  double lam1_sum = sym_eigenvalues(sum_rest)[0];
  double sum_lam1 = 0.0;
  for (int l = 1; l < n; ++l) sum_lam1 += sym_eigenvalues(f.mats[l] * f.mats[l])[0];
  rep.additivity_gap = std::abs(lam1_sum - sum_lam1);

  rep.conclusions_hold = rep.hypothesis_holds && rep.v_max_abs <= tol * scale && rep.ranks_ok &&
                         rep.additivity_gap <= tol * scale;
  return rep;
}

Rank2Basis rank2_adapted_basis(const std::vector<Mat<double>>& ks, double tol) {
  const int n = static_cast<int>(ks.size());
  if (n == 0) throw HypothesisViolated("empty family");
  const int m = ks[0].rows();
  if (n >= m) throw HypothesisViolated("need strictly fewer matrices than the dimension");
  double scale = 1.0;
  for (const auto& k : ks) {
    if (k.rows() != m || k.cols() != m) throw SizeMismatch("family matrices must share a size");
    scale = std::max(scale, k.norm_inf());
  }
  double scale2 = std::max(1.0, scale * scale);
  for (const auto& k : ks)
    if ((k + k.transposed()).norm_inf() > tol * std::max(1.0, scale))
      throw HypothesisViolated("matrix is not skew-symmetric");
  for (const auto& k : ks)
    if (rank_of(k) != 2) throw HypothesisViolated("matrix rank is not 2");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs((ks[i] * ks[j]).trace()) > tol * scale2)
        throw HypothesisViolated("family is not trace-orthogonal");

  Mat<double> total(m, m);
  for (const auto& k : ks) total = total + k * k;
  double lam1 = sym_eigenvalues(total)[0];
  double sum_lam1 = 0.0;
  for (const auto& k : ks) sum_lam1 += sym_eigenvalues(k * k)[0];
  if (std::abs(lam1 - sum_lam1) > tol * scale2)
    throw HypothesisViolated("smallest eigenvalue is not additive");

  auto [evals, evecs] = sym_eigensystem(total);
  std::vector<double> u0(m);
  for (int r = 0; r < m; ++r) u0[r] = evecs(r, 0);
  // Deterministic sign: largest-magnitude entry positive.
  int imax = 0;
  for (int r = 1; r < m; ++r)
    if (std::abs(u0[r]) > std::abs(u0[imax])) imax = r;
  if (u0[imax] < 0)
    for (double& x : u0) x = -x;

  Rank2Basis out;
  out.n = n;
  std::vector<std::vector<double>> cols;
  cols.push_back(u0);
  for (const auto& k : ks) {
    std::vector<double> ku = mat_vec(k, u0);
    double norm = 0.0;
    for (double x : ku) norm += x * x;
    norm = std::sqrt(norm);
    if (norm <= tol * std::max(1.0, scale))
      throw HypothesisViolated("a family member annihilates the principal eigenvector");
    for (double& x : ku) x /= norm;
    out.alphas.push_back(norm);
    cols.push_back(std::move(ku));
  }
  // Complete with standard vectors, Gram-Schmidt in index order.
  for (int j = 0; j < m && static_cast<int>(cols.size()) < m; ++j) {
    std::vector<double> w(m, 0.0);
    w[j] = 1.0;
    for (const auto& c : cols) {
      double proj = 0.0;
      for (int r = 0; r < m; ++r) proj += w[r] * c[r];
      for (int r = 0; r < m; ++r) w[r] -= proj * c[r];
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 1e-6) {
      for (double& x : w) x /= norm;
      cols.push_back(std::move(w));
    }
  }
  if (static_cast<int>(cols.size()) != m)
    throw HypothesisViolated("could not complete an orthonormal basis");

  out.basis = Mat<double>(m, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < m; ++r) out.basis(r, c) = cols[c][r];

  out.gram_residual =
      (out.basis.transposed() * out.basis - Mat<double>::identity(m)).norm_inf();
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) {
      std::vector<double> image = mat_vec(ks[i], cols[c]);
      std::vector<double> want(m, 0.0);
      if (c == 0) {
        for (int r = 0; r < m; ++r) want[r] = out.alphas[i] * cols[i + 1][r];
      } else if (c == i + 1) {
        for (int r = 0; r < m; ++r) want[r] = -out.alphas[i] * cols[0][r];
      }  // other columns: K_i should vanish
      double gap = 0.0;
      for (int r = 0; r < m; ++r) gap = std::max(gap, std::abs(image[r] - want[r]));
      out.action_residual = std::max(out.action_residual, gap);
    }
  }
  return out;
}

namespace {

// Both equations are homogeneous under (K, alpha_i) -> (cK, c alpha_i), so the
// search normalizes sum(alpha_i^2) = 1 without losing solutions. Each share
// alpha_i^2 is kept above a fixed floor so A stays negative definite: letting
// the alpha_i (and with them K) collapse to zero satisfies both equations
// trivially but leaves the set of valid triples. With A negative definite the
// first equation pins tr(K^2) = 2 tr(A) = -2, and its right-hand side is
// negative definite, so K is automatically invertible near any solution.
struct KapLayout {
  int d = 0;        // 2k
  int skew_count = 0;

  explicit KapLayout(int k) : d(2 * k), skew_count(k * (2 * k - 1)) {}
  int n_params() const { return skew_count * 2 + d; }
  double share_floor() const { return std::min(0.01, 0.5 / d); }

  Mat<double> skew_from(const std::vector<double>& x, int offset) const {
    Mat<double> s(d, d);
    int idx = offset;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j, ++idx) {
        s(i, j) = x[idx];
        s(j, i) = -x[idx];
      }
    return s;
  }

  KapTriple<double> build(const std::vector<double>& x, bool alpha_negative,
                          bool reflect) const {
    KapTriple<double> t;
    t.k_mat = skew_from(x, 0);
    t.a_diag = Mat<double>(d, d);
    double tmax = x[skew_count];
    for (int i = 1; i < d; ++i) tmax = std::max(tmax, x[skew_count + i]);
    double total = 0.0;
    std::vector<double> w(d);
    for (int i = 0; i < d; ++i) {
      w[i] = std::exp(x[skew_count + i] - tmax);
      total += w[i];
    }
    const double floor2 = share_floor();
    const double rest = 1.0 - d * floor2;
    for (int i = 0; i < d; ++i) t.a_diag(i, i) = -(floor2 + rest * w[i] / total);
    Mat<double> gen = skew_from(x, skew_count + d);
    t.p_mat = matrix_exp(gen);
    if (reflect) {
      for (int r = 0; r < d; ++r) t.p_mat(r, d - 1) = -t.p_mat(r, d - 1);
    }
    t.alpha = alpha_negative ? -1.0 : 1.0;
    return t;
  }
};

double kap_objective(const KapTriple<double>& t) {
  Mat<double> p_inv = t.p_mat.transposed();
  Mat<double> eq1 = t.k_mat * t.k_mat - p_inv * t.a_diag * t.p_mat - t.a_diag;
  Mat<double> eq2 = t.alpha * t.k_mat - t.a_diag * t.p_mat + p_inv * t.a_diag;
  double sum = 0.0;
  for (int r = 0; r < eq1.rows(); ++r)
    for (int c = 0; c < eq1.cols(); ++c) sum += eq1(r, c) * eq1(r, c) + eq2(r, c) * eq2(r, c);
  return sum;
}

}  // namespace

KapSearchResult kap_search(int k, int restarts, std::uint64_t seed) {
  if (k < 1) throw ParameterOutOfRange("k must be at least 1");
  if (restarts < 1) throw ParameterOutOfRange("restarts must be at least 1");
  KapLayout layout(k);

  struct Slot {
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> x;
    long evals = 0;
    bool alpha_negative = false;
    bool reflect = false;
  };
  std::vector<Slot> slots(restarts);

  parallel_for_index(restarts, [&](int r) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(r));
    bool alpha_negative = (r % 4) & 1;
    bool reflect = (r % 4) & 2;
    std::vector<double> x0(layout.n_params());
    std::vector<double> step(layout.n_params());
    for (int i = 0; i < layout.skew_count; ++i) {
      x0[i] = rng.uniform(-2.0, 2.0);
      step[i] = 0.5;
    }
    for (int i = 0; i < layout.d; ++i) {
      x0[layout.skew_count + i] = rng.uniform(-1.0, 1.0);
      step[layout.skew_count + i] = 0.3;
    }
    for (int i = 0; i < layout.skew_count; ++i) {
      x0[layout.skew_count + layout.d + i] = rng.uniform(-3.14159265358979, 3.14159265358979);
      step[layout.skew_count + layout.d + i] = 0.5;
    }
    auto f = [&](const std::vector<double>& x) {
      return kap_objective(layout.build(x, alpha_negative, reflect));
    };
    NelderMeadConfig cfg;
    cfg.max_evals = 40000;
    OptimResult res = nelder_mead(f, x0, step, cfg);
    // One polishing pass from the found point with a tight simplex.
    std::vector<double> polish_step(layout.n_params(), 1e-6);
    OptimResult res2 = nelder_mead(f, res.x, polish_step, cfg);
    Slot& s = slots[r];
    s.evals = res.evals + res2.evals;
    s.alpha_negative = alpha_negative;
    s.reflect = reflect;
    if (res2.value <= res.value) {
      s.objective = res2.value;
      s.x = std::move(res2.x);
    } else {
      s.objective = res.value;
      s.x = std::move(res.x);
    }
  });

  KapSearchResult out;
  out.k = k;
  out.restarts = restarts;
  out.seed = seed;
  int best = 0;
  for (int r = 0; r < restarts; ++r) {
    out.total_evals += slots[r].evals;
    if (slots[r].objective < slots[best].objective) best = r;
  }
  out.best_restart = best;
  out.best = layout.build(slots[best].x, slots[best].alpha_negative, slots[best].reflect);
  out.best_residual = kap_residual(out.best);
  return out;
}

} // namespace nilcurv
