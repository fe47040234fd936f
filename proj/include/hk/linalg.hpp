#pragma once
// Small dense matrices over double or Taylor scalars, plus the few Eigen
// wrappers used for conditioning and rank decisions.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hk/taylor.hpp"

namespace hk {

struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
struct SMat {
  int r = 0, c = 0;
  std::vector<S> a;

  SMat() = default;
  SMat(int rows, int cols, const S& fill) : r(rows), c(cols), a(static_cast<std::size_t>(rows) * cols, fill) {}
  S& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * c + j]; }
  const S& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * c + j]; }
};

using Mat = SMat<double>;
using TMat = SMat<Taylor>;

inline Mat identity(int n) {
  Mat m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

template <class S>
SMat<S> matmul(const SMat<S>& x, const SMat<S>& y) {
  if (x.c != y.r) throw ShapeError("matmul: inner dimensions differ");
  SMat<S> z(x.r, y.c, zero_like(x.a.at(0)));
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < y.c; ++j) {
      S s = zero_like(x.a[0]);
      for (int m = 0; m < x.c; ++m) s = s + x(i, m) * y(m, j);
      z(i, j) = s;
    }
  return z;
}

template <class S>
SMat<S> madd(const SMat<S>& x, const SMat<S>& y, double sy = 1.0) {
  SMat<S> z = x;
  for (std::size_t i = 0; i < z.a.size(); ++i) z.a[i] = z.a[i] + y.a[i] * sy;
  return z;
}

template <class S>
SMat<S> transpose(const SMat<S>& x) {
  SMat<S> z(x.c, x.r, x.a.at(0));
  for (int i = 0; i < x.r; ++i)
    for (int j = 0; j < x.c; ++j) z(j, i) = x(i, j);
  return z;
}

inline Mat values(const TMat& m) {
  Mat z(m.r, m.c, 0.0);
  for (std::size_t i = 0; i < m.a.size(); ++i) z.a[i] = m.a[i].value();
  return z;
}

// Gaussian elimination with partial pivoting on the scalar part. Solves
// A X = B for X; works for Taylor entries because pivot choice only looks
// at the base value.
template <class S>
SMat<S> solve(SMat<S> A, SMat<S> B) {
  int n = A.r;
  if (A.c != n || B.r != n) throw ShapeError("solve: dimension mismatch");
  double scale = 0.0;
  for (const auto& v : A.a) scale = std::max(scale, std::abs(scalar_value(v)));
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(scalar_value(A(col, col)));
    for (int i = col + 1; i < n; ++i) {
      double v = std::abs(scalar_value(A(i, col)));
      if (v > best) best = v, piv = i;
    }
    if (!(best > 1e-14 * scale)) throw DegeneracyError("solve: matrix is singular to working precision");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(A(col, j), A(piv, j));
      for (int j = 0; j < B.c; ++j) std::swap(B(col, j), B(piv, j));
    }
    S inv = 1.0 / A(col, col);
    for (int i = col + 1; i < n; ++i) {
      S f = A(i, col) * inv;
      for (int j = col; j < n; ++j) A(i, j) = A(i, j) - f * A(col, j);
      for (int j = 0; j < B.c; ++j) B(i, j) = B(i, j) - f * B(col, j);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    S inv = 1.0 / A(col, col);
    for (int j = 0; j < B.c; ++j) {
      S s = B(col, j);
      for (int m = col + 1; m < n; ++m) s = s - A(col, m) * B(m, j);
      B(col, j) = s * inv;
    }
  }
  return B;
}

template <class S>
SMat<S> inverse(const SMat<S>& A) {
  SMat<S> I(A.r, A.r, zero_like(A.a.at(0)));
  for (int i = 0; i < A.r; ++i) I(i, i) = constant_like(A.a[0], 1.0);
  return solve(A, I);
}

inline Eigen::MatrixXd to_eigen(const Mat& m) {
  Eigen::MatrixXd e(m.r, m.c);
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.c; ++j) e(i, j) = m(i, j);
  return e;
}
inline Mat from_eigen(const Eigen::MatrixXd& e) {
  Mat m(static_cast<int>(e.rows()), static_cast<int>(e.cols()), 0.0);
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.c; ++j) m(i, j) = e(i, j);
  return m;
}

inline double max_abs(const Mat& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::abs(v));
  return s;
}
inline double max_abs_diff(const Mat& x, const Mat& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.a.size(); ++i) s = std::max(s, std::abs(x.a[i] - y.a[i]));
  return s;
}

// singular values, descending
inline Eigen::VectorXd singular_values(const Mat& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m));
  return svd.singularValues();
}

inline int numeric_rank(const Mat& m, double rel = 1e-8) {
  Eigen::VectorXd s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

}  // namespace hk
