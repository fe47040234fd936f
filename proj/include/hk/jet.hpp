#pragma once
// Points of T*^k M, index conventions, fiber homotheties and chart changes.
//
// Storage: a flat vector of (k+1)n reals, block-major: block 0 is x, block a
// (1 <= a <= k-1) is y^(a), block k is p.

#include <cstdint>
#include <string>
#include <vector>

#include "hk/linalg.hpp"
#include "hk/poly.hpp"
#include "hk/taylor.hpp"

namespace hk {

constexpr double kNullTol = 1e-12;
constexpr double kCondMax = 1e12;

struct BundleShape {
  int n = 1, k = 2;

  BundleShape() = default;
  BundleShape(int n_, int k_);
  int dim() const { return (k + 1) * n; }
  int x(int i) const { return i; }
  int y(int a, int i) const { return a * n + i; }
  int p(int i) const { return k * n + i; }
  int block_of(int idx) const { return idx / n; }
  bool operator==(const BundleShape& o) const { return n == o.n && k == o.k; }
};

struct JetPoint {
  BundleShape shape;
  std::vector<double> u;

  JetPoint() = default;
  JetPoint(BundleShape s, std::vector<double> v);
  static JetPoint zero(BundleShape s) { return JetPoint(s, std::vector<double>(s.dim(), 0.0)); }

  double x(int i) const { return u[shape.x(i)]; }
  double y(int a, int i) const { return u[shape.y(a, i)]; }
  double p(int i) const { return u[shape.p(i)]; }
  bool off_null(double tol = kNullTol) const;
  std::string str() const;
};

// (x, a y1, a^2 y2, ..., a^k p)
template <class S>
std::vector<S> scale_fibers(const BundleShape& sh, const std::vector<S>& u, double a) {
  if (!(a > 0.0)) throw DomainError("fiber scaling needs a positive factor");
  std::vector<S> r = u;
  double f = 1.0;
  for (int b = 1; b <= sh.k; ++b) {
    f *= a;
    for (int i = 0; i < sh.n; ++i) r[b * sh.n + i] = r[b * sh.n + i] * f;
  }
  return r;
}
JetPoint scale_fibers(const JetPoint& u, double a);

// A chart change on M given together with its inverse, each evaluable at
// doubles, Taylor and Taylor2 points.
struct Diffeomorphism {
  int n = 0;
  Tri<VecSig> forward, inverse;
};

// x~ = A s(x), s_i = x_i + c_i x_{i+1}^2 (triangular, exactly invertible),
// callable at any scalar level
struct QuadraticMap {
  Mat A, Ai;
  std::vector<double> c;

  template <class S>
  std::vector<S> forward(const std::vector<S>& x) const {
    int n = A.r;
    auto s = x;
    for (int i = 0; i + 1 < n; ++i) s[i] = s[i] + x[i + 1] * x[i + 1] * c[i];
    return apply(A, s);
  }
  template <class S>
  std::vector<S> inverse(const std::vector<S>& xt) const {
    int n = A.r;
    auto x = apply(Ai, xt);
    // back substitution through the shear
    for (int i = n - 2; i >= 0; --i) x[i] = x[i] - x[i + 1] * x[i + 1] * c[i];
    return x;
  }

 private:
  template <class S>
  static std::vector<S> apply(const Mat& M, const std::vector<S>& x) {
    std::vector<S> r;
    for (int i = 0; i < M.r; ++i) {
      S s = x[0] * M(i, 0);
      for (int j = 1; j < M.c; ++j) s = s + x[j] * M(i, j);
      r.push_back(s);
    }
    return r;
  }
};

QuadraticMap random_quadratic_map(int n, std::uint64_t seed, double amp = 0.3);
Diffeomorphism to_diffeo(const QuadraticMap& q);

Diffeomorphism identity_diffeo(int n);
// x~ = A x
Diffeomorphism linear_diffeo(const Mat& A);
Diffeomorphism quadratic_diffeo(const Mat& A, const std::vector<double>& c);
// random instance of the above, A close to identity
Diffeomorphism random_diffeo(int n, std::uint64_t seed, double amp = 0.3);

// Jacobian d(phi^i)/dx^j at x, at scalar level S
template <class S>
SMat<S> jacobian(const Tri<VecSig>& phi, const std::vector<S>& x) {
  int n = static_cast<int>(x.size());
  const TaylorSpace* sp = TaylorSpace::get(n, 1);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < n; ++i) X.push_back(TaylorT<S>::variable(sp, i, x[i]));
  std::vector<TaylorT<S>> Y = phi(X);
  SMat<S> J(n, n, zero_like(x[0]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J(i, j) = Y[i].coef(sp->var_index(j));
  return J;
}

// The induced map on T*^k M. Only double and Taylor levels are supported
// (the computation itself climbs one Taylor level).
template <class S>
std::vector<S> transform_point(const BundleShape& sh, const std::vector<S>& u, const Tri<VecSig>& phi) {
  int n = sh.n, k = sh.k;
  // curve germ c(t) = x + y1 t + ... + y(k-1) t^(k-1); y~(a) is the t^a
  // coefficient of phi(c(t))
  const TaylorSpace* tsp = TaylorSpace::get(1, k - 1);
  TaylorT<S> t = TaylorT<S>::variable(tsp, 0, zero_like(u[0]));
  std::vector<TaylorT<S>> c(n);
  for (int i = 0; i < n; ++i) {
    TaylorT<S> acc = TaylorT<S>::constant(tsp, u[sh.x(i)]);
    TaylorT<S> tp = t;
    for (int a = 1; a < k; ++a) {
      acc = acc + tp * u[sh.y(a, i)];
      if (a + 1 < k) tp = tp * t;
    }
    c[i] = acc;
  }
  std::vector<TaylorT<S>> pc = phi(c);
  std::vector<S> r(u.size(), zero_like(u[0]));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < k; ++a) r[a * n + i] = pc[i].coef(a);
  std::vector<S> x(u.begin(), u.begin() + n);
  SMat<S> J = jacobian(phi, x);
  SMat<S> P(n, 1, zero_like(u[0]));
  for (int i = 0; i < n; ++i) P(i, 0) = u[sh.p(i)];
  SMat<S> pt = solve(transpose(J), P);
  for (int i = 0; i < n; ++i) r[sh.p(i)] = pt(i, 0);
  return r;
}
JetPoint transform_point(const JetPoint& u, const Diffeomorphism& phi);

enum class Variance { Up, Down };

// Block label of a d-tensor slot: 0 = H, a = V_a, k = W_k
struct Slot {
  Variance var = Variance::Up;
  int block = 0;
};

struct DTensor {
  int n = 0;
  std::vector<Slot> slots;
  std::vector<double> comp;

  DTensor() = default;
  DTensor(int n_, std::vector<Slot> s);
  int rank() const { return static_cast<int>(slots.size()); }
  std::size_t offset(const std::vector<int>& idx) const;
  double& at(const std::vector<int>& idx) { return comp[offset(idx)]; }
  double at(const std::vector<int>& idx) const { return comp[offset(idx)]; }
  double max_abs() const;
};

DTensor from_matrix(const Mat& m, Slot a, Slot b);
Mat to_matrix(const DTensor& t);
double max_abs_diff(const DTensor& a, const DTensor& b);

// components in the chart x~ = phi(x), evaluated at the point u (source chart)
DTensor transform_dtensor(const DTensor& T, const Diffeomorphism& phi, const JetPoint& u);

// counter-based uniform stream in [-1, 1]
struct CounterRng {
  std::uint64_t seed = 0, counter = 0;
  explicit CounterRng(std::uint64_t s) : seed(s) {}
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * 0.5 * (uniform() + 1.0); }
};

JetPoint random_point(const BundleShape& sh, CounterRng& rng, double scale = 1.0);

}  // namespace hk
