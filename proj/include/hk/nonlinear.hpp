#pragma once
// Nonlinear connections on T*^k M.
//
// Matrix conventions: N[a-1](j, i) = N_(a)^j_i, M[a-1](i, j) = M_(a)^i_j
// (row = upper index), Nlow(i, j) = N_ij.

#include <functional>
#include <string>
#include <vector>

#include "hk/field.hpp"
#include "hk/linalg.hpp"

namespace hk {

template <class S>
struct ConnCoeffsT {
  std::vector<SMat<S>> M, N;
  SMat<S> Nlow;
};
using ConnCoeffs = ConnCoeffsT<Taylor>;
using ConnValues = ConnCoeffsT<double>;

struct NonlinearConnection {
  BundleShape shape;
  std::string name;
  // coefficients along an expansion (Taylor in all coordinates)
  std::function<ConnCoeffs(const Expansion&)> eval;
  // expansion order needed to read plain values
  int value_order = 1;
};

ConnValues values(const ConnCoeffs& c);
ConnValues connection_values(const NonlinearConnection& N, const JetPoint& u);

// M_(a) = N_(a) + sum_{b=1}^{a-1} N_(a-b) M_(b)
template <class S>
std::vector<SMat<S>> dual_from_primal(const std::vector<SMat<S>>& N) {
  std::vector<SMat<S>> M;
  for (std::size_t a = 0; a < N.size(); ++a) {
    SMat<S> m = N[a];
    for (std::size_t b = 0; b < a; ++b) m = madd(m, matmul(N[a - b - 1], M[b]));
    M.push_back(m);
  }
  return M;
}

// inverse of the above
template <class S>
std::vector<SMat<S>> primal_from_dual(const std::vector<SMat<S>>& M) {
  std::vector<SMat<S>> N;
  for (std::size_t a = 0; a < M.size(); ++a) {
    SMat<S> m = M[a];
    for (std::size_t b = 0; b < a; ++b) m = madd(m, matmul(N[a - b - 1], M[b]), -1.0);
    N.push_back(m);
  }
  return N;
}

NonlinearConnection zero_connection(const BundleShape& sh);
// constant primal coefficients N_(1..k-1) and N_ij
NonlinearConnection constant_connection(const BundleShape& sh, const std::vector<Mat>& N, const Mat& Nlow);
// primal coefficients given as arbitrary smooth fields (generic lambda returning ConnCoeffsT<S>
// with N and Nlow filled); M is derived
template <class F>
NonlinearConnection primal_connection(const BundleShape& sh, std::string name, F f, int value_order = 0) {
  NonlinearConnection c;
  c.shape = sh;
  c.name = std::move(name);
  c.value_order = value_order;
  c.eval = [f](const Expansion& ex) {
    ConnCoeffs r = f(ex.X);
    r.M = dual_from_primal(r.N);
    return r;
  };
  return c;
}

// A Riemannian metric gamma_ij(x) on the base, evaluable at every scalar level.
using Taylor3 = TaylorT<Taylor2>;

struct BaseMetric {
  int n = 0;
  std::string name;
  Tri<MatSig> g;  // argument: x (n entries)
  // one level deeper, for anchors evaluated inside fiber Hessians
  std::function<MatSig<Taylor3>> g3;

  template <class S>
  SMat<S> operator()(const std::vector<S>& x) const {
    if constexpr (std::is_same_v<S, Taylor3>)
      return g3(x);
    else
      return g(x);
  }
};

// gamma^i_{jk}; entry i*n*n + j*n + k
template <class S>
std::vector<S> christoffel(const BaseMetric& bm, const std::vector<S>& x) {
  int n = bm.n;
  using T = TaylorT<S>;
  const TaylorSpace* sp = TaylorSpace::get(n, 1);
  std::vector<T> X;
  for (int i = 0; i < n; ++i) X.push_back(T::variable(sp, i, x[i]));
  SMat<T> G = bm(X);
  SMat<S> g0(n, n, zero_like(x[0]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g0(i, j) = G(i, j).coef(0);
  auto dg = [&](int l, int i, int j) { return G(i, j).coef(sp->var_index(l)); };
  SMat<S> gi = inverse(g0);
  std::vector<S> out(static_cast<std::size_t>(n) * n * n, zero_like(x[0]));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      std::vector<S> low;
      for (int l = 0; l < n; ++l) low.push_back((dg(j, l, k) + dg(k, l, j) - dg(l, j, k)) * 0.5);
      for (int i = 0; i < n; ++i) {
        S s = zero_like(x[0]);
        for (int l = 0; l < n; ++l) s = s + gi(i, l) * low[l];
        out[(i * n + j) * n + k] = s;
        out[(i * n + k) * n + j] = s;
      }
    }
  return out;
}

template <class F>
BaseMetric make_base_metric(int n, std::string name, F f) {
  return BaseMetric{n, std::move(name), make_tri<MatSig>(f), [f](const std::vector<Taylor3>& x) { return f(x); }};
}

// Dual coefficients prolonged from gamma:
//   M_(1)^i_j = gamma^i_jm y1^m,  M_(a) = (1/a)(Gamma M_(a-1) + M_(1) M_(a-1)).
// N_ij = gamma^h_ij p_h (symmetric) completes the connection.
NonlinearConnection prolong_riemann(const BaseMetric& g, const BundleShape& sh);

struct DualSemispray {
  BundleShape shape;
  std::vector<ScalarField> xi, eta;
};

// M_(a)^i_j = -d xi^i / d y^(k-a)j, N from M, N_ij = delta eta_i / delta y1^j
NonlinearConnection connection_from_semispray(const DualSemispray& S);

// Adapted derivatives (delta/delta x, delta/delta y(a), d/dp) from natural
// partials grad (length (k+1)n), at either level.
template <class S>
std::vector<S> adapted_from_natural(const BundleShape& sh, const ConnCoeffsT<S>& c, const std::vector<S>& grad) {
  int n = sh.n, k = sh.k;
  std::vector<S> r = grad;
  for (int i = 0; i < n; ++i) {
    S s = grad[sh.x(i)];
    for (int a = 1; a < k; ++a)
      for (int j = 0; j < n; ++j) s = s - c.N[a - 1](j, i) * grad[sh.y(a, j)];
    for (int j = 0; j < n; ++j) s = s + c.Nlow(i, j) * grad[sh.p(j)];
    r[sh.x(i)] = s;
  }
  for (int a = 1; a < k; ++a)
    for (int i = 0; i < n; ++i) {
      S s = grad[sh.y(a, i)];
      for (int b = 1; a + b < k; ++b)
        for (int j = 0; j < n; ++j) s = s - c.N[b - 1](j, i) * grad[sh.y(a + b, j)];
      r[sh.y(a, i)] = s;
    }
  return r;
}

std::vector<double> adapted_derivative(const NonlinearConnection& N, const ScalarField& f, const JetPoint& u);
// Taylor-level adapted gradient of a Taylor quantity t along ex
std::vector<Taylor> adapted_gradient(const BundleShape& sh, const ConnCoeffs& c, const Taylor& t);

// Frame E (column A = X_A in natural components) and coframe Theta (row A).
Mat frame_matrix(const BundleShape& sh, const ConnValues& c);
Mat coframe_matrix(const BundleShape& sh, const ConnValues& c);
TMat frame_matrix_t(const BundleShape& sh, const ConnCoeffs& c, const Expansion& ex);

// c[(A*D + B)*D + C]: [X_A, X_B] = c_AB^C X_C at u
std::vector<double> frame_brackets(const NonlinearConnection& N, const JetPoint& u);

// z^(a)i, a = 1..k-1 (each an up H-slot vector)
std::vector<std::vector<double>> liouville_d_vectors(const NonlinearConnection& N, const JetPoint& u);
template <class S>
std::vector<std::vector<S>> liouville_from(const BundleShape& sh, const std::vector<SMat<S>>& M, const std::vector<S>& u) {
  int n = sh.n;
  std::vector<std::vector<S>> z;
  for (int a = 1; a < sh.k; ++a) {
    std::vector<S> v;
    for (int i = 0; i < n; ++i) {
      S s = u[sh.y(a, i)] * double(a);
      for (int b = 1; b < a; ++b)
        for (int m = 0; m < n; ++m) s = s + M[b - 1](i, m) * u[sh.y(a - b, m)] * double(a - b);
      v.push_back(s * (1.0 / a));
    }
    z.push_back(v);
  }
  return z;
}

}  // namespace hk
