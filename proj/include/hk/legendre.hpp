#pragma once
// Legendre maps between T^k M and T*^k M, dual Hamiltonians and Lagrangians.
//
// A Lagrangian is a ScalarField over the same (k+1)n flat layout as a
// Hamiltonian, with block k read as y^(k) instead of p.

#include <cmath>
#include <string>
#include <vector>

#include "hk/field.hpp"
#include "hk/metric.hpp"
#include "hk/nonlinear.hpp"

namespace hk {

struct LagrangeSpace {
  BundleShape shape;
  ScalarField L;
};

struct InversionError : DomainError {
  std::vector<double> trace;  // residual per Newton iteration
  InversionError(const std::string& msg, std::vector<double> t) : DomainError(msg), trace(std::move(t)) {}
};

// Dual coefficients M_(1..k-1) of a connection on T^{k-1}M, as a callable of
// (x, y1, ..., y(k-1)) (block k of the argument is ignored).
// Flat layout: ((a-1)*n + i)*n + j = M_(a)^i_j.
struct Anchor {
  BundleShape shape;
  std::string name;
  Tri<VecSig> M;

  template <class S>
  std::vector<S> operator()(const std::vector<S>& u) const {
    return M(u);
  }
};

Anchor zero_anchor(const BundleShape& sh);
Anchor constant_anchor(const BundleShape& sh, const std::vector<Mat>& M);

// M_(a) of the Riemannian prolongation, evaluated through the curve
// c(t) = x + y1 t + ... + y(k-1) t^(k-1), on which Gamma is d/dt.
template <class S>
std::vector<S> prolonged_dual_coeffs(const BaseMetric& g, const BundleShape& sh, const std::vector<S>& u) {
  using T = TaylorT<S>;
  int n = sh.n, k = sh.k, ord = std::max(k - 1, 1);
  S z = zero_like(u[0]);
  const TaylorSpace* sp = TaylorSpace::get(n + 1, ord);
  const TaylorSpace* s1 = TaylorSpace::get(1, ord);
  T t = T::variable(sp, 0, z);
  std::vector<T> X;
  for (int i = 0; i < n; ++i) {
    T acc = T::variable(sp, 1 + i, u[sh.x(i)]);
    T tp = t;
    for (int b = 1; b < k; ++b) {
      acc = acc + tp * u[sh.y(b, i)];
      tp = tp * t;
    }
    X.push_back(acc);
  }
  SMat<T> G = g(X);
  using T1 = TaylorT<S>;
  SMat<T1> g0(n, n, T1::constant(s1, z));
  std::vector<T1> dg(static_cast<std::size_t>(n) * n * n, T1::constant(s1, z));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      g0(i, j) = restrict_leading(G(i, j), s1);
      for (int l = 0; l < n; ++l) dg[(l * n + i) * n + j] = restrict_leading(d(G(i, j), 1 + l), s1);
    }
  SMat<T1> gi = inverse(g0);
  std::vector<T1> y1;
  for (int i = 0; i < n; ++i) y1.push_back(d(restrict_leading(X[i], s1), 0));
  SMat<T1> M1(n, n, T1::constant(s1, z));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T1 s = T1::constant(s1, z);
      for (int m = 0; m < n; ++m) {
        T1 chr = T1::constant(s1, z);
        for (int l = 0; l < n; ++l)
          chr = chr + gi(i, l) * (dg[(j * n + l) * n + m] + dg[(m * n + l) * n + j] - dg[(l * n + j) * n + m]) * 0.5;
        s = s + chr * y1[m];
      }
      M1(i, j) = s;
    }
  std::vector<SMat<T1>> M{M1};
  for (int a = 2; a < k; ++a) {
    SMat<T1> nx = matmul(M1, M.back());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) nx(i, j) = (nx(i, j) + d(M.back()(i, j), 0)) * (1.0 / a);
    M.push_back(nx);
  }
  std::vector<S> out;
  for (const auto& m : M)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.push_back(m(i, j).value());
  return out;
}

Anchor prolonged_anchor(const BaseMetric& g, const BundleShape& sh);

// (1/k) sum_{a=1}^{k-1} (k-a) M_(a) y^(k-a): z^(k) = y^(k) + shift
template <class S>
std::vector<S> anchor_shift(const Anchor& A, const std::vector<S>& u) {
  const BundleShape& sh = A.shape;
  int n = sh.n, k = sh.k;
  std::vector<S> M = A(u);
  std::vector<S> r(n, zero_like(u[0]));
  for (int a = 1; a < k; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r[i] = r[i] + M[((a - 1) * n + i) * n + j] * u[sh.y(k - a, j)] * (double(k - a) / k);
  return r;
}

// 1/2 dF/dw and 1/2 d2F/dw dw, w = block k of u
template <class S>
struct FiberJet {
  std::vector<S> grad;
  SMat<S> hess;
};

template <class S>
FiberJet<S> fiber_jet(const ScalarField& F, const std::vector<S>& u) {
  const BundleShape& sh = F.shape;
  int n = sh.n, D = sh.dim();
  const TaylorSpace* sp = TaylorSpace::get(n, 2);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < D; ++i)
    X.push_back(i >= sh.p(0) ? TaylorT<S>::variable(sp, i - sh.p(0), u[i]) : TaylorT<S>::constant(sp, u[i]));
  TaylorT<S> t = F(X);
  FiberJet<S> r{std::vector<S>(n, zero_like(u[0])), SMat<S>(n, n, zero_like(u[0]))};
  for (int i = 0; i < n; ++i) {
    r.grad[i] = t.coef(sp->var_index(i)) * 0.5;
    for (int j = 0; j < n; ++j) r.hess(i, j) = t.partial({i, j}) * 0.5;
  }
  return r;
}

// Damped Newton for 1/2 dF/dw(u; w) = target, seeded at w = 0.
std::vector<double> fiber_newton(const ScalarField& F, const std::vector<double>& u, const std::vector<double>& target,
                                 int max_iter = 50, double tol = 1e-11);

// Same solve at double or Taylor level. At the Taylor level the constant term
// comes from fiber_newton and the higher coefficients from Newton steps in
// Taylor arithmetic (each step doubles the number of exact orders).
template <class S>
std::vector<S> fiber_solve(const ScalarField& F, const std::vector<S>& u, const std::vector<S>& target) {
  if constexpr (std::is_same_v<S, double>) {
    return fiber_newton(F, u, target);
  } else {
    std::vector<double> u0, t0;
    for (const auto& v : u) u0.push_back(scalar_value(v));
    for (const auto& v : target) t0.push_back(scalar_value(v));
    std::vector<double> w0 = fiber_newton(F, u0, t0);
    const BundleShape& sh = F.shape;
    int n = sh.n;
    std::vector<S> v = u;
    for (int i = 0; i < n; ++i) v[sh.p(i)] = constant_like(u[0], w0[i]);
    int steps = 1;
    for (int o = 1; o < u[0].sp->order() + 1; o *= 2) ++steps;
    for (int s = 0; s < steps; ++s) {
      FiberJet<S> J = fiber_jet(F, v);
      SMat<S> r(n, 1, zero_like(u[0]));
      for (int i = 0; i < n; ++i) r(i, 0) = J.grad[i] - target[i];
      SMat<S> dw = solve(J.hess, r);
      for (int i = 0; i < n; ++i) v[sh.p(i)] = v[sh.p(i)] - dw(i, 0);
    }
    return std::vector<S>(v.begin() + sh.p(0), v.end());
  }
}

// a_ij = 1/2 d2L/dy(k)i dy(k)j, regularity-gated (throws DegeneracyError)
Mat lagrange_tensor(const LagrangeSpace& L, const JetPoint& v);
// (x, y1..y(k-1), p = 1/2 dL/dy(k))
JetPoint legendre_forward(const LagrangeSpace& L, const JetPoint& v);
// y(k) = xi(u)
std::vector<double> legendre_inverse(const LagrangeSpace& L, const JetPoint& u);

template <class S>
std::vector<S> legendre_inverse_at(const LagrangeSpace& L, const std::vector<S>& u) {
  const BundleShape& sh = L.shape;
  return fiber_solve(L.L, u, std::vector<S>(u.begin() + sh.p(0), u.end()));
}
// xi^i as a scalar field on T*^k M
ScalarField xi_field(const LagrangeSpace& L, int i);

// H = 2 p.z^(k) - L(xi), z^(k) = xi + anchor shift
ScalarField dual_hamiltonian(const LagrangeSpace& L, const Anchor& A);
// L = 2 p.z^(k) - H with p solving 1/2 dH/dp = z^(k)
LagrangeSpace dual_lagrangian(const ScalarField& H, const Anchor& A);

// (k+1) G^i = 1/2 a^{ij} (Gamma(dL/dy(k)j) - dL/dy(k-1)j), Gamma = sum_{a=1}^{k} a y(a) d/dy(a-1)
template <class S>
std::vector<S> semispray_at(const LagrangeSpace& L, const std::vector<S>& v) {
  const BundleShape& sh = L.shape;
  int n = sh.n, k = sh.k, D = sh.dim();
  const TaylorSpace* sp = TaylorSpace::get(D, 2);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < D; ++i) X.push_back(TaylorT<S>::variable(sp, i, v[i]));
  TaylorT<S> t = L.L(X);
  S z = zero_like(v[0]);
  SMat<S> a(n, n, z), rhs(n, 1, z);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) a(i, j) = t.partial({sh.p(i), sh.p(j)}) * 0.5;
    S g = z;
    for (int b = 1; b <= k; ++b)
      for (int m = 0; m < n; ++m) g = g + v[sh.y(b, m)] * t.partial({sh.y(b - 1, m), sh.p(j)}) * double(b);
    rhs(j, 0) = (g - t.coef(sp->var_index(sh.y(k - 1, j)))) * 0.5;
  }
  SMat<S> G = solve(a, rhs);
  std::vector<S> r;
  for (int i = 0; i < n; ++i) r.push_back(G(i, 0) * (1.0 / (k + 1)));
  return r;
}
std::vector<double> canonical_semispray(const LagrangeSpace& L, const JetPoint& v);

// eta_i of the pushed-forward semispray: phi_* S evaluated at y(k) = xi(u)
template <class S>
std::vector<S> eta_at(const LagrangeSpace& L, const std::vector<S>& u) {
  const BundleShape& sh = L.shape;
  int n = sh.n, k = sh.k, D = sh.dim();
  std::vector<S> v = u;
  std::vector<S> xi = legendre_inverse_at(L, u);
  for (int i = 0; i < n; ++i) v[sh.p(i)] = xi[i];
  std::vector<S> G = semispray_at(L, v);
  const TaylorSpace* sp = TaylorSpace::get(D, 2);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < D; ++i) X.push_back(TaylorT<S>::variable(sp, i, v[i]));
  TaylorT<S> t = L.L(X);
  std::vector<S> eta(n, zero_like(u[0]));
  for (int i = 0; i < n; ++i) {
    S s = zero_like(u[0]);
    // d phi_i / d y(a)m = 1/2 d2L / dy(k)i dy(a)m
    for (int a = 0; a < k; ++a)
      for (int m = 0; m < n; ++m) s = s + v[sh.y(a + 1, m)] * t.partial({sh.p(i), sh.y(a, m)}) * (0.5 * (a + 1));
    for (int m = 0; m < n; ++m) s = s - G[m] * t.partial({sh.p(m), sh.p(i)}) * (0.5 * (k + 1));
    eta[i] = s;
  }
  return eta;
}
std::vector<double> dual_eta(const LagrangeSpace& L, const JetPoint& u);
// -a_is (sum_a (a+1) y(a+1) d xi^s/d y(a) + (k+1) G^s), y(k) -> xi, with the
// xi partials taken from xi itself (cross-check of the pushforward)
std::vector<double> dual_eta_from_xi(const LagrangeSpace& L, const JetPoint& u);

DualSemispray dual_semispray(const LagrangeSpace& L);
// canonical nonlinear connection of T*^k M induced through the Legendre map
NonlinearConnection legendre_connection(const LagrangeSpace& L);

}  // namespace hk
