#include "hk/legendre.hpp"

#include <algorithm>
#include <sstream>

namespace hk {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> fiber_residual(const ScalarField& F, std::vector<double> u, const std::vector<double>& w,
                                   const std::vector<double>& target) {
  const BundleShape& sh = F.shape;
  for (int i = 0; i < sh.n; ++i) u[sh.p(i)] = w[i];
  FiberJet<double> J = fiber_jet(F, u);
  for (int i = 0; i < sh.n; ++i) J.grad[i] -= target[i];
  return J.grad;
}

}  // namespace

Anchor zero_anchor(const BundleShape& sh) {
  std::size_t m = static_cast<std::size_t>(sh.k - 1) * sh.n * sh.n;
  Anchor A;
  A.shape = sh;
  A.name = "zero";
  A.M = make_tri<VecSig>([m](const auto& u) { return std::vector(m, zero_like(u[0])); });
  return A;
}

Anchor constant_anchor(const BundleShape& sh, const std::vector<Mat>& M) {
  if (static_cast<int>(M.size()) != sh.k - 1) throw ShapeError("anchor needs k-1 coefficient matrices");
  std::vector<double> flat;
  for (const auto& m : M)
    for (int i = 0; i < sh.n; ++i)
      for (int j = 0; j < sh.n; ++j) flat.push_back(m(i, j));
  Anchor A;
  A.shape = sh;
  A.name = "constant";
  A.M = make_tri<VecSig>([flat](const auto& u) {
    std::vector<std::decay_t<decltype(u[0])>> r;
    for (double v : flat) r.push_back(constant_like(u[0], v));
    return r;
  });
  return A;
}

Anchor prolonged_anchor(const BaseMetric& g, const BundleShape& sh) {
  if (g.n != sh.n) throw ShapeError("base metric dimension differs from the bundle");
  Anchor A;
  A.shape = sh;
  A.name = "prolongation of " + g.name;
  A.M = make_tri<VecSig>([g, sh](const auto& u) { return prolonged_dual_coeffs(g, sh, u); });
  return A;
}

std::vector<double> fiber_newton(const ScalarField& F, const std::vector<double>& u, const std::vector<double>& target,
                                 int max_iter, double tol) {
  const BundleShape& sh = F.shape;
  int n = sh.n;
  double scale = std::max(1.0, max_abs(target));
  std::vector<double> w(n, 0.0);
  std::vector<double> r = fiber_residual(F, u, w, target);
  double res = max_abs(r);
  std::vector<double> trace{res};
  for (int it = 0; it < max_iter && res >= tol * scale; ++it) {
    std::vector<double> v = u;
    for (int i = 0; i < n; ++i) v[sh.p(i)] = w[i];
    Mat J = fiber_jet(F, v).hess;
    Mat R(n, 1, 0.0);
    for (int i = 0; i < n; ++i) R(i, 0) = r[i];
    Mat dw;
    try {
      dw = solve(J, R);
    } catch (const DegeneracyError&) {
      break;
    }
    double lam = 1.0;
    std::vector<double> wn(n), rn;
    double resn = 0.0;
    for (;;) {
      for (int i = 0; i < n; ++i) wn[i] = w[i] - lam * dw(i, 0);
      rn = fiber_residual(F, u, wn, target);
      resn = max_abs(rn);
      if (resn < res || lam < 1e-3) break;
      lam *= 0.5;
    }
    w = wn;
    r = rn;
    res = resn;
    trace.push_back(res);
  }
  if (!(res < tol * scale)) {
    std::ostringstream os;
    os << "fiber inversion did not converge, residual trace:";
    for (double t : trace) os << ' ' << t;
    throw InversionError(os.str(), trace);
  }
  return w;
}

Mat lagrange_tensor(const LagrangeSpace& L, const JetPoint& v) {
  Mat a = fiber_jet(L.L, v.u).hess;
  // metric_pair applies the regularity gate to any symmetric matrix
  metric_pair(a, v);
  return a;
}

JetPoint legendre_forward(const LagrangeSpace& L, const JetPoint& v) {
  lagrange_tensor(L, v);
  FiberJet<double> J = fiber_jet(L.L, v.u);
  JetPoint u = v;
  for (int i = 0; i < v.shape.n; ++i) u.u[v.shape.p(i)] = J.grad[i];
  return u;
}

std::vector<double> legendre_inverse(const LagrangeSpace& L, const JetPoint& u) { return legendre_inverse_at(L, u.u); }

ScalarField xi_field(const LagrangeSpace& L, int i) {
  ScalarField f;
  f.shape = L.shape;
  f.name = "xi" + std::to_string(i + 1);
  f.f.d = [L, i](const std::vector<double>& u) { return legendre_inverse_at(L, u)[i]; };
  f.f.t = [L, i](const std::vector<Taylor>& u) { return legendre_inverse_at(L, u)[i]; };
  return f;
}

namespace {

template <class S>
S dual_h_at(const LagrangeSpace& L, const Anchor& A, const std::vector<S>& u) {
  const BundleShape& sh = L.shape;
  std::vector<S> xi = legendre_inverse_at(L, u);
  std::vector<S> sh_k = anchor_shift(A, u);
  std::vector<S> v = u;
  S s = zero_like(u[0]);
  for (int i = 0; i < sh.n; ++i) {
    v[sh.p(i)] = xi[i];
    s = s + u[sh.p(i)] * (xi[i] + sh_k[i]) * 2.0;
  }
  return s - L.L(v);
}

template <class S>
S dual_l_at(const ScalarField& H, const Anchor& A, const std::vector<S>& v) {
  const BundleShape& sh = H.shape;
  std::vector<S> shift = anchor_shift(A, v);
  std::vector<S> z;
  for (int i = 0; i < sh.n; ++i) z.push_back(v[sh.p(i)] + shift[i]);
  std::vector<S> p = fiber_solve(H, v, z);
  std::vector<S> u = v;
  S s = zero_like(v[0]);
  for (int i = 0; i < sh.n; ++i) {
    u[sh.p(i)] = p[i];
    s = s + p[i] * z[i] * 2.0;
  }
  return s - H(u);
}

}  // namespace

ScalarField dual_hamiltonian(const LagrangeSpace& L, const Anchor& A) {
  if (!(A.shape == L.shape)) throw ShapeError("anchor and Lagrangian shapes differ");
  ScalarField f;
  f.shape = L.shape;
  f.name = "dual of " + L.L.name;
  f.f.d = [L, A](const std::vector<double>& u) { return dual_h_at(L, A, u); };
  f.f.t = [L, A](const std::vector<Taylor>& u) { return dual_h_at(L, A, u); };
  return f;
}

LagrangeSpace dual_lagrangian(const ScalarField& H, const Anchor& A) {
  if (!(A.shape == H.shape)) throw ShapeError("anchor and Hamiltonian shapes differ");
  ScalarField f;
  f.shape = H.shape;
  f.name = "dual of " + H.name;
  f.f.d = [H, A](const std::vector<double>& v) { return dual_l_at(H, A, v); };
  f.f.t = [H, A](const std::vector<Taylor>& v) { return dual_l_at(H, A, v); };
  return LagrangeSpace{H.shape, f};
}

std::vector<double> canonical_semispray(const LagrangeSpace& L, const JetPoint& v) {
  lagrange_tensor(L, v);
  return semispray_at(L, v.u);
}

std::vector<double> dual_eta(const LagrangeSpace& L, const JetPoint& u) { return eta_at(L, u.u); }

std::vector<double> dual_eta_from_xi(const LagrangeSpace& L, const JetPoint& u) {
  const BundleShape& sh = L.shape;
  int n = sh.n, k = sh.k;
  std::vector<double> xi = legendre_inverse(L, u);
  std::vector<std::vector<double>> dxi;
  for (int s = 0; s < n; ++s) dxi.push_back(gradient(xi_field(L, s), u));
  JetPoint v = u;
  for (int i = 0; i < n; ++i) v.u[sh.p(i)] = xi[i];
  Mat a = lagrange_tensor(L, v);
  std::vector<double> G = semispray_at(L, v.u);
  std::vector<double> inner(n, 0.0);
  for (int s = 0; s < n; ++s) {
    double acc = (k + 1) * G[s];
    for (int al = 0; al < k; ++al)
      for (int r = 0; r < n; ++r) acc += (al + 1) * v.u[sh.y(al + 1, r)] * dxi[s][sh.y(al, r)];
    inner[s] = acc;
  }
  std::vector<double> eta(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < n; ++s) eta[i] -= a(i, s) * inner[s];
  return eta;
}

DualSemispray dual_semispray(const LagrangeSpace& L) {
  DualSemispray S;
  S.shape = L.shape;
  for (int i = 0; i < L.shape.n; ++i) {
    S.xi.push_back(xi_field(L, i));
    ScalarField e;
    e.shape = L.shape;
    e.name = "eta" + std::to_string(i + 1);
    e.f.d = [L, i](const std::vector<double>& u) { return eta_at(L, u)[i]; };
    e.f.t = [L, i](const std::vector<Taylor>& u) { return eta_at(L, u)[i]; };
    S.eta.push_back(e);
  }
  return S;
}

NonlinearConnection legendre_connection(const LagrangeSpace& L) {
  NonlinearConnection c = connection_from_semispray(dual_semispray(L));
  c.name = "Legendre image of " + L.L.name;
  return c;
}

}  // namespace hk
