#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace nilcurv {

/// Derivative-free simplex descent (reflection/expansion/contraction/shrink
/// with the standard coefficients). Deterministic: ties in the ordering are
/// broken by vertex index.
struct NelderMeadConfig {
  double alpha = 1.0;       ///< reflection
  double gamma = 2.0;       ///< expansion
  double rho = 0.5;         ///< contraction
  double sigma = 0.5;       ///< shrink
  double diameter_tol = 1e-10;
  long max_evals = 100000;
  /// Stop as soon as the best value is at or below this; -inf disables the
  /// exit. Lets callers that only need "good enough" skip the tail of the
  /// descent (and, in the restarted driver, the polish cascade).
  double target = -std::numeric_limits<double>::infinity();
};

struct OptimResult {
  std::vector<double> x;
  double value = 0.0;
  long evals = 0;
  long iterations = 0;
  bool converged = false;
};

inline OptimResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                               const std::vector<double>& x0, const std::vector<double>& step,
                               const NelderMeadConfig& cfg = {}) {
  const int n = static_cast<int>(x0.size());
  OptimResult out;
  if (n == 0) {
    out.x = x0;
    out.value = f(x0);
    out.evals = 1;
    out.converged = true;
    return out;
  }

  std::vector<std::vector<double>> verts(n + 1, x0);
  for (int i = 0; i < n; ++i) verts[i + 1][i] += step[i];
  std::vector<double> vals(n + 1);
  for (int i = 0; i <= n; ++i) vals[i] = f(verts[i]);
  out.evals = n + 1;

  std::vector<int> order(n + 1);
  auto sort_order = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
  };
  auto diameter = [&]() {
    double d = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < n; ++k) d = std::max(d, std::abs(verts[i][k] - verts[0][k]));
    return d;
  };

  while (out.evals < cfg.max_evals) {
    sort_order();
    if (vals[order[0]] <= cfg.target) {
      out.converged = true;
      break;
    }
    if (diameter() < cfg.diameter_tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    int best = order[0], worst = order[n], second_worst = order[n - 1];

    std::vector<double> centroid(n, 0.0);
    for (int i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < n; ++k) centroid[k] += verts[i][k];
    }
    for (int k = 0; k < n; ++k) centroid[k] /= n;

    auto combine = [&](double coef) {
      std::vector<double> p(n);
      for (int k = 0; k < n; ++k) p[k] = centroid[k] + coef * (centroid[k] - verts[worst][k]);
      return p;
    };

    std::vector<double> refl = combine(cfg.alpha);
    double frefl = f(refl);
    ++out.evals;

    if (frefl < vals[best]) {
      std::vector<double> exp = combine(cfg.alpha * cfg.gamma);
      double fexp = f(exp);
      ++out.evals;
      if (fexp < frefl) {
        verts[worst] = std::move(exp);
        vals[worst] = fexp;
      } else {
        verts[worst] = std::move(refl);
        vals[worst] = frefl;
      }
      continue;
    }
    if (frefl < vals[second_worst]) {
      verts[worst] = std::move(refl);
      vals[worst] = frefl;
      continue;
    }
    // Contraction: outside when the reflected point improves on the worst.
    std::vector<double> contr(n);
    if (frefl < vals[worst]) {
      for (int k = 0; k < n; ++k)
        contr[k] = centroid[k] + cfg.rho * (refl[k] - centroid[k]);
    } else {
      for (int k = 0; k < n; ++k)
        contr[k] = centroid[k] + cfg.rho * (verts[worst][k] - centroid[k]);
    }
    double fcontr = f(contr);
    ++out.evals;
    if (fcontr < std::min(frefl, vals[worst])) {
      verts[worst] = std::move(contr);
      vals[worst] = fcontr;
      continue;
    }
    // Shrink toward the best vertex.
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (int k = 0; k < n; ++k)
        verts[i][k] = verts[best][k] + cfg.sigma * (verts[i][k] - verts[best][k]);
      vals[i] = f(verts[i]);
      ++out.evals;
    }
  }

  sort_order();
  out.x = verts[order[0]];
  out.value = vals[order[0]];
  return out;
}

/// Central-difference gradient, a diagnostic companion to the simplex search.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& f,
                                       const std::vector<double>& x, double step = 1e-6) {
  std::vector<double> g(x.size());
  std::vector<double> p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + step;
    double up = f(p);
    p[i] = x[i] - step;
    double dn = f(p);
    p[i] = x[i];
    g[i] = (up - dn) / (2.0 * step);
  }
  return g;
}

} // namespace nilcurv
