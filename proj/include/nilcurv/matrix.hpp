#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

#include "nilcurv/errors.hpp"
#include "nilcurv/scalar.hpp"

namespace nilcurv {

/// Dense row-major matrix over either scalar mode. Small dimensions only; all
/// algorithms here are cubic at worst and prefer clarity over blocking.
template <class S>
class Mat {
public:
  Mat() = default;
  Mat(int rows, int cols) : m_rows(rows), m_cols(cols), m_data(static_cast<std::size_t>(rows) * cols, S(0)) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  /// Row-by-row construction, mainly for tests and family tables.
  static Mat of(std::initializer_list<std::initializer_list<S>> rows) {
    Mat m(static_cast<int>(rows.size()), rows.size() ? static_cast<int>(rows.begin()->size()) : 0);
    int i = 0;
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != m.m_cols) throw DimensionMismatch("ragged initializer");
      int j = 0;
      for (const auto& x : r) m(i, j++) = x;
      ++i;
    }
    return m;
  }

  int rows() const { return m_rows; }
  int cols() const { return m_cols; }

  S& operator()(int i, int j) { return m_data[static_cast<std::size_t>(i) * m_cols + j]; }
  const S& operator()(int i, int j) const { return m_data[static_cast<std::size_t>(i) * m_cols + j]; }

  bool operator==(const Mat& o) const = default;

  Mat operator+(const Mat& o) const {
    require_same_shape(o);
    Mat r(m_rows, m_cols);
    for (std::size_t k = 0; k < m_data.size(); ++k) r.m_data[k] = m_data[k] + o.m_data[k];
    return r;
  }

  Mat operator-(const Mat& o) const {
    require_same_shape(o);
    Mat r(m_rows, m_cols);
    for (std::size_t k = 0; k < m_data.size(); ++k) r.m_data[k] = m_data[k] - o.m_data[k];
    return r;
  }

  Mat operator-() const {
    Mat r(m_rows, m_cols);
    for (std::size_t k = 0; k < m_data.size(); ++k) r.m_data[k] = -m_data[k];
    return r;
  }

  Mat operator*(const Mat& o) const {
    if (m_cols != o.m_rows) throw DimensionMismatch("matrix product shape mismatch");
    Mat r(m_rows, o.m_cols);
    for (int i = 0; i < m_rows; ++i)
      for (int k = 0; k < m_cols; ++k) {
        const S& a = (*this)(i, k);
        if (a == S(0)) continue;
        for (int j = 0; j < o.m_cols; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }

  friend Mat operator*(const S& s, const Mat& m) {
    Mat r(m.m_rows, m.m_cols);
    for (std::size_t k = 0; k < m.m_data.size(); ++k) r.m_data[k] = s * m.m_data[k];
    return r;
  }

  Mat transposed() const {
    Mat r(m_cols, m_rows);
    for (int i = 0; i < m_rows; ++i)
      for (int j = 0; j < m_cols; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  S trace() const {
    S t(0);
    int n = std::min(m_rows, m_cols);
    for (int i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
  }

  bool is_zero() const {
    for (const auto& x : m_data)
      if (!(x == S(0))) return false;
    return true;
  }

  /// Entrywise max |.| as a double, for residual reporting in either mode.
  double norm_inf() const {
    double m = 0.0;
    for (const auto& x : m_data) m = std::max(m, std::abs(to_double(x)));
    return m;
  }

  std::vector<S> col(int j) const {
    std::vector<S> v(m_rows, S(0));
    for (int i = 0; i < m_rows; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(int j, const std::vector<S>& v) {
    for (int i = 0; i < m_rows; ++i) (*this)(i, j) = v[i];
  }

private:
  void require_same_shape(const Mat& o) const {
    if (m_rows != o.m_rows || m_cols != o.m_cols) throw DimensionMismatch("shape mismatch");
  }

  int m_rows = 0, m_cols = 0;
  std::vector<S> m_data;
};

template <class S>
std::vector<S> mat_vec(const Mat<S>& a, const std::vector<S>& v) {
  if (a.cols() != static_cast<int>(v.size())) throw DimensionMismatch("mat_vec shape mismatch");
  std::vector<S> r(a.rows(), S(0));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
  return r;
}

template <class S>
Mat<S> hcat(const Mat<S>& a, const Mat<S>& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hcat row mismatch");
  Mat<S> r(a.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (int j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
  }
  return r;
}

template <class S>
Mat<S> block_diag(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> r(a.rows() + b.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) r(a.rows() + i, a.cols() + j) = b(i, j);
  return r;
}

template <class S>
Mat<S> from_cols(const std::vector<std::vector<S>>& cols, int rows) {
  Mat<S> r(rows, static_cast<int>(cols.size()));
  for (int j = 0; j < r.cols(); ++j) {
    if (static_cast<int>(cols[j].size()) != rows) throw DimensionMismatch("from_cols length mismatch");
    for (int i = 0; i < rows; ++i) r(i, j) = cols[j][i];
  }
  return r;
}

// ---- elimination-based kernels, used directly in exact mode ----

template <class S>
struct Rref {
  Mat<S> mat;
  std::vector<int> pivot_cols;
  int rank = 0;
};

/// Reduced row echelon form with partial pivoting. In exact mode zero tests
/// are exact; in float mode entries below eps (relative to the largest entry)
/// are treated as zero. Float callers normally go through the SVD instead.
template <class S>
Rref<S> rref(Mat<S> m, double eps = 1e-12) {
  const int nr = m.rows(), nc = m.cols();
  double scale = 0.0;
  if constexpr (!is_exact_v<S>) {
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j) scale = std::max(scale, std::abs(to_double(m(i, j))));
    if (scale == 0.0) scale = 1.0;
  }
  auto negligible = [&](const S& x) {
    if constexpr (is_exact_v<S>)
      return x == S(0);
    else
      return std::abs(to_double(x)) <= eps * scale;
  };

  Rref<S> out;
  int row = 0;
  for (int col = 0; col < nc && row < nr; ++col) {
    int piv = -1;
    double best = 0.0;
    for (int r = row; r < nr; ++r) {
      double mag = std::abs(to_double(m(r, col)));
      if (!negligible(m(r, col)) && mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (piv < 0) continue;
    for (int j = 0; j < nc; ++j) std::swap(m(row, j), m(piv, j));
    S d = m(row, col);
    for (int j = 0; j < nc; ++j) m(row, j) = m(row, j) / d;
    m(row, col) = S(1);
    for (int r = 0; r < nr; ++r) {
      if (r == row || m(r, col) == S(0)) continue;
      S f = m(r, col);
      for (int j = 0; j < nc; ++j) m(r, j) -= f * m(row, j);
      m(r, col) = S(0);
    }
    out.pivot_cols.push_back(col);
    ++row;
  }
  // Flush eliminated rows to exact zero in float mode so rank reads cleanly.
  if constexpr (!is_exact_v<S>) {
    for (int r = row; r < nr; ++r)
      for (int j = 0; j < nc; ++j)
        if (negligible(m(r, j))) m(r, j) = S(0);
  }
  out.mat = std::move(m);
  out.rank = row;
  return out;
}

/// Kernel basis as columns, from the echelon form. Canonical in exact mode.
template <class S>
Mat<S> kernel_by_elimination(const Mat<S>& m, double eps = 1e-12) {
  Rref<S> r = rref(m, eps);
  const int nc = m.cols();
  std::vector<bool> is_pivot(nc, false);
  for (int c : r.pivot_cols) is_pivot[c] = true;
  std::vector<std::vector<S>> cols;
  for (int free = 0; free < nc; ++free) {
    if (is_pivot[free]) continue;
    std::vector<S> v(nc, S(0));
    v[free] = S(1);
    for (int pr = 0; pr < r.rank; ++pr) v[r.pivot_cols[pr]] = -r.mat(pr, free);
    cols.push_back(std::move(v));
  }
  return from_cols(cols, nc);
}

/// Canonical basis of the column span via elimination on the transpose.
template <class S>
Mat<S> span_by_elimination(const Mat<S>& m, double eps = 1e-12) {
  Rref<S> r = rref(m.transposed(), eps);
  std::vector<std::vector<S>> cols;
  for (int i = 0; i < r.rank; ++i) {
    std::vector<S> v(m.rows(), S(0));
    for (int j = 0; j < m.rows(); ++j) v[j] = r.mat(i, j);
    cols.push_back(std::move(v));
  }
  return from_cols(cols, m.rows());
}

template <class S>
S det(Mat<S> m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("det of non-square matrix");
  const int n = m.rows();
  S d(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 0.0;
    for (int r = col; r < n; ++r) {
      double mag = std::abs(to_double(m(r, col)));
      if (!(m(r, col) == S(0)) && mag >= best) {
        best = mag;
        piv = r;
      }
    }
    if (piv < 0) return S(0);
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(piv, j));
      d = -d;
    }
    d *= m(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (m(r, col) == S(0)) continue;
      S f = m(r, col) / m(col, col);
      for (int j = col; j < n; ++j) m(r, j) -= f * m(col, j);
    }
  }
  return d;
}

/// Gauss-Jordan solve of A X = B; nullopt when A is (numerically) singular.
template <class S>
std::optional<Mat<S>> try_solve(Mat<S> a, Mat<S> b, double eps = 1e-12) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) throw DimensionMismatch("solve shape mismatch");
  const int n = a.rows();
  double scale = 0.0;
  if constexpr (!is_exact_v<S>) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) scale = std::max(scale, std::abs(to_double(a(i, j))));
    if (scale == 0.0) scale = 1.0;
  }
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    double best = 0.0;
    for (int r = col; r < n; ++r) {
      double mag = std::abs(to_double(a(r, col)));
      if (!(a(r, col) == S(0)) && mag >= best) {
        best = mag;
        piv = r;
      }
    }
    if constexpr (is_exact_v<S>) {
      if (piv < 0) return std::nullopt;
    } else {
      if (piv < 0 || best <= eps * scale) return std::nullopt;
    }
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (int j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    S d = a(col, col);
    for (int j = 0; j < n; ++j) a(col, j) = a(col, j) / d;
    for (int j = 0; j < b.cols(); ++j) b(col, j) = b(col, j) / d;
    for (int r = 0; r < n; ++r) {
      if (r == col || a(r, col) == S(0)) continue;
      S f = a(r, col);
      for (int j = 0; j < n; ++j) a(r, j) -= f * a(col, j);
      for (int j = 0; j < b.cols(); ++j) b(r, j) -= f * b(col, j);
    }
  }
  return b;
}

template <class S>
Mat<S> inverse(const Mat<S>& a, double eps = 1e-12) {
  auto r = try_solve(a, Mat<S>::identity(a.rows()), eps);
  if (!r) throw SingularTransform("matrix is not invertible");
  return *r;
}

} // namespace nilcurv
