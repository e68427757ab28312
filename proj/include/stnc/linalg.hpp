// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stnc/errors.hpp"

namespace stnc {

/// Dense square matrix, row major. Sized for code-correlation matrices
/// (Q <= 16), not for large linear algebra.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double fill = 0.0) : n_(n), v_(static_cast<size_t>(n) * n, fill) {}

  static SquareMatrix identity(int n) {
    SquareMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int size() const { return n_; }
  double& operator()(int i, int j) { return v_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return v_[static_cast<size_t>(i) * n_ + j]; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<double> v_;
};

namespace detail {

// Solve A x = b by Gaussian elimination with partial pivoting. A pivot below
// 1e-12 of its row's max magnitude is treated as singular.
inline std::vector<double> solve_partial_pivot(SquareMatrix a, std::vector<double> b) {
  const int n = a.size();
  std::vector<double> row_scale(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) row_scale[i] = std::max(row_scale[i], std::fabs(a(i, j)));
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::fabs(a(i, col)) > std::fabs(a(piv, col))) piv = i;
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      std::swap(b[col], b[piv]);
      std::swap(row_scale[col], row_scale[piv]);
    }
    const double p = a(col, col);
    if (std::fabs(p) <= 1e-12 * std::max(row_scale[col], 1e-300))
      throw SingularCorrelation("correlation matrix is numerically singular at pivot " +
                                std::to_string(col + 1));
    for (int i = col + 1; i < n; ++i) {
      const double f = a(i, col) / p;
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      b[i] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

// Cholesky probe; true iff the matrix is symmetric positive definite.
inline bool is_positive_definite(const SquareMatrix& m) {
  const int n = m.size();
  SquareMatrix l(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (s <= 0.0) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace detail
}  // namespace stnc
