#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nilcurv/matrix.hpp"

namespace nilcurv {

// Thresholds for float-mode rank decisions, relative to the largest singular
// value. The kernel cut is tighter than the rank cut so that a direction must
// be decisively small before it counts as null.
inline constexpr double kKernelRelTol = 1e-9;
inline constexpr double kRankRelTol = 1e-8;

inline Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

inline Mat<double> from_eigen(const Eigen::MatrixXd& e) {
  Mat<double> m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < e.rows(); ++i)
    for (int j = 0; j < e.cols(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = e(i, j);
  return m;
}

/// Eigenvalues of a symmetric matrix in ascending order.
inline std::vector<double> sym_eigenvalues(const Mat<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m), Eigen::EigenvaluesOnly);
  std::vector<double> v(m.rows());
  for (int i = 0; i < m.rows(); ++i) v[i] = es.eigenvalues()(i);
  return v;
}

/// Ascending eigenvalues plus the matching orthonormal eigenvector columns.
inline std::pair<std::vector<double>, Mat<double>> sym_eigensystem(const Mat<double>& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  std::vector<double> v(m.rows());
  for (int i = 0; i < m.rows(); ++i) v[i] = es.eigenvalues()(i);
  return {v, from_eigen(es.eigenvectors())};
}

inline std::vector<double> singular_values(const Mat<double>& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  std::vector<double> v(svd.singularValues().size());
  for (int i = 0; i < svd.singularValues().size(); ++i) v[i] = svd.singularValues()(i);
  return v;
}

template <class S>
int rank_of(const Mat<S>& m) {
  if constexpr (is_exact_v<S>) {
    return rref(m).rank;
  } else {
    auto sv = singular_values(m);
    if (sv.empty() || sv.front() == 0.0) return 0;
    int r = 0;
    for (double s : sv)
      if (s > kRankRelTol * sv.front()) ++r;
    return r;
  }
}

/// Kernel basis as columns. Exact mode eliminates; float mode takes the right
/// singular vectors whose singular value is <= 1e-9 of the largest.
template <class S>
Mat<S> kernel(const Mat<S>& m) {
  if constexpr (is_exact_v<S>) {
    return kernel_by_elimination(m);
  } else {
    if (m.cols() == 0) return Mat<S>(0, 0);
    if (m.rows() == 0) return Mat<S>::identity(m.cols());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    int r = 0;
    if (smax > 0.0)
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > kKernelRelTol * smax) ++r;
    Eigen::MatrixXd v = svd.matrixV();
    Mat<S> out(m.cols(), m.cols() - r);
    for (int j = r; j < m.cols(); ++j)
      for (int i = 0; i < m.cols(); ++i) out(i, j - r) = v(i, j);
    return out;
  }
}

/// Orthonormal (float) or canonical echelon (exact) basis of the column span.
template <class S>
Mat<S> column_span(const Mat<S>& m) {
  if constexpr (is_exact_v<S>) {
    return span_by_elimination(m);
  } else {
    if (m.rows() == 0 || m.cols() == 0) return Mat<S>(m.rows(), 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    int r = 0;
    if (smax > 0.0)
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > kRankRelTol * smax) ++r;
    Eigen::MatrixXd u = svd.matrixU();
    Mat<S> out(m.rows(), r);
    for (int j = 0; j < r; ++j)
      for (int i = 0; i < m.rows(); ++i) out(i, j) = u(i, j);
    return out;
  }
}

/// Least-squares solution of A x = b (float only).
inline std::vector<double> lsq_solve(const Mat<double>& a, const std::vector<double>& b) {
  Eigen::VectorXd rhs(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rhs(static_cast<int>(i)) = b[i];
  Eigen::VectorXd x = to_eigen(a).colPivHouseholderQr().solve(rhs);
  std::vector<double> out(a.cols());
  for (int i = 0; i < a.cols(); ++i) out[i] = x(i);
  return out;
}

inline Mat<double> matrix_exp(const Mat<double>& m) {
  Eigen::MatrixXd e = to_eigen(m).exp();
  return from_eigen(e);
}

} // namespace nilcurv
