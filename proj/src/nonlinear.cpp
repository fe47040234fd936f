#include "hk/nonlinear.hpp"

namespace hk {

namespace {

template <class S>
SMat<S> frame_generic(const BundleShape& sh, const ConnCoeffsT<S>& c, const S& zero, const S& one) {
  int n = sh.n, k = sh.k, D = sh.dim();
  SMat<S> E(D, D, zero);
  for (int A = 0; A < D; ++A) E(A, A) = one;
  for (int i = 0; i < n; ++i) {
    for (int a = 1; a < k; ++a)
      for (int j = 0; j < n; ++j) E(sh.y(a, j), sh.x(i)) = -c.N[a - 1](j, i);
    for (int j = 0; j < n; ++j) E(sh.p(j), sh.x(i)) = c.Nlow(i, j);
  }
  for (int a = 1; a < k; ++a)
    for (int b = 1; a + b < k; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) E(sh.y(a + b, j), sh.y(a, i)) = -c.N[b - 1](j, i);
  return E;
}

}  // namespace

ConnValues values(const ConnCoeffs& c) {
  ConnValues v;
  for (const auto& m : c.M) v.M.push_back(hk::values(m));
  for (const auto& m : c.N) v.N.push_back(hk::values(m));
  v.Nlow = hk::values(c.Nlow);
  return v;
}

ConnValues connection_values(const NonlinearConnection& N, const JetPoint& u) {
  Expansion ex(u.shape, u.u, N.value_order);
  return values(N.eval(ex));
}

NonlinearConnection zero_connection(const BundleShape& sh) {
  return constant_connection(sh, std::vector<Mat>(sh.k - 1, Mat(sh.n, sh.n, 0.0)), Mat(sh.n, sh.n, 0.0));
}

NonlinearConnection constant_connection(const BundleShape& sh, const std::vector<Mat>& N, const Mat& Nlow) {
  if (static_cast<int>(N.size()) != sh.k - 1) throw ShapeError("need k-1 primal coefficient matrices");
  NonlinearConnection c;
  c.shape = sh;
  c.name = "constant";
  c.value_order = 0;
  c.eval = [N, Nlow](const Expansion& ex) {
    auto lift = [&](const Mat& m) {
      TMat t(m.r, m.c, ex.zero());
      for (std::size_t i = 0; i < m.a.size(); ++i) t.a[i] = ex.cst(m.a[i]);
      return t;
    };
    ConnCoeffs r;
    for (const auto& m : N) r.N.push_back(lift(m));
    r.M = dual_from_primal(r.N);
    r.Nlow = lift(Nlow);
    return r;
  };
  return c;
}

NonlinearConnection prolong_riemann(const BaseMetric& g, const BundleShape& sh) {
  if (g.n != sh.n) throw ShapeError("base metric dimension differs from the bundle");
  NonlinearConnection c;
  c.shape = sh;
  c.name = "prolongation of " + g.name;
  c.value_order = std::max(0, sh.k - 2);
  c.eval = [g, sh](const Expansion& ex) {
    int n = sh.n, k = sh.k;
    std::vector<Taylor> x(ex.X.begin(), ex.X.begin() + n);
    std::vector<Taylor> chr = christoffel(g, x);
    ConnCoeffs r;
    TMat M1(n, n, ex.zero());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Taylor s = ex.zero();
        for (int m = 0; m < n; ++m) s = s + chr[(i * n + j) * n + m] * ex.X[sh.y(1, m)];
        M1(i, j) = s;
      }
    r.M.push_back(M1);
    for (int a = 2; a < k; ++a) {
      const TMat& prev = r.M.back();
      TMat next = matmul(M1, prev);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          // Gamma = y1 d/dx + 2 y2 d/dy1 + ...; prev only depends on y up to a-1, so b stops at a
          Taylor gam = ex.zero();
          for (int b = 1; b <= a; ++b)
            for (int m = 0; m < n; ++m) gam = gam + d(prev(i, j), (b - 1) * n + m) * ex.X[sh.y(b, m)] * double(b);
          next(i, j) = (next(i, j) + gam) * (1.0 / a);
        }
      r.M.push_back(next);
    }
    r.N = primal_from_dual(r.M);
    r.Nlow = TMat(n, n, ex.zero());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Taylor s = ex.zero();
        for (int h = 0; h < n; ++h) s = s + chr[(h * n + i) * n + j] * ex.X[sh.p(h)];
        r.Nlow(i, j) = s;
      }
    return r;
  };
  return c;
}

NonlinearConnection connection_from_semispray(const DualSemispray& S) {
  const BundleShape sh = S.shape;
  if (static_cast<int>(S.xi.size()) != sh.n || static_cast<int>(S.eta.size()) != sh.n)
    throw ShapeError("semispray needs n components of xi and eta");
  NonlinearConnection c;
  c.shape = sh;
  c.name = "from dual semispray";
  c.value_order = 1;
  c.eval = [S, sh](const Expansion& ex) {
    int n = sh.n, k = sh.k;
    std::vector<Taylor> xi, eta;
    for (const auto& f : S.xi) xi.push_back(f(ex.X));
    for (const auto& f : S.eta) eta.push_back(f(ex.X));
    ConnCoeffs r;
    for (int a = 1; a < k; ++a) {
      TMat m(n, n, ex.zero());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = -d(xi[i], sh.y(k - a, j));
      r.M.push_back(m);
    }
    r.N = primal_from_dual(r.M);
    // delta/delta y1 of eta: d/dy1 - sum_b N_(b) d/dy(1+b)
    r.Nlow = TMat(n, n, ex.zero());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Taylor s = d(eta[i], sh.y(1, j));
        for (int b = 1; 1 + b < k; ++b)
          for (int m = 0; m < n; ++m) s = s - r.N[b - 1](m, j) * d(eta[i], sh.y(1 + b, m));
        r.Nlow(i, j) = s;
      }
    return r;
  };
  return c;
}

std::vector<double> adapted_derivative(const NonlinearConnection& N, const ScalarField& f, const JetPoint& u) {
  Expansion ex(u.shape, u.u, std::max(1, N.value_order));
  ConnValues c = values(N.eval(ex));
  Taylor t = f(ex.X);
  std::vector<double> g(u.shape.dim());
  for (int i = 0; i < u.shape.dim(); ++i) g[i] = t.coef(ex.sp->var_index(i));
  return adapted_from_natural(u.shape, c, g);
}

std::vector<Taylor> adapted_gradient(const BundleShape& sh, const ConnCoeffs& c, const Taylor& t) {
  std::vector<Taylor> g;
  for (int i = 0; i < sh.dim(); ++i) g.push_back(d(t, i));
  return adapted_from_natural(sh, c, g);
}

Mat frame_matrix(const BundleShape& sh, const ConnValues& c) { return frame_generic(sh, c, 0.0, 1.0); }

TMat frame_matrix_t(const BundleShape& sh, const ConnCoeffs& c, const Expansion& ex) {
  return frame_generic(sh, c, ex.zero(), ex.cst(1.0));
}

Mat coframe_matrix(const BundleShape& sh, const ConnValues& c) {
  int n = sh.n, k = sh.k, D = sh.dim();
  Mat T = identity(D);
  for (int a = 1; a < k; ++a)
    for (int b = 1; b <= a; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T(sh.y(a, i), (a - b) * n + j) = c.M[b - 1](i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) T(sh.p(i), sh.x(j)) = -c.Nlow(j, i);
  return T;
}

std::vector<double> frame_brackets(const NonlinearConnection& N, const JetPoint& u) {
  const auto& sh = u.shape;
  int D = sh.dim();
  Expansion ex(sh, u.u, std::max(1, N.value_order + 1));
  ConnCoeffs ct = N.eval(ex);
  TMat Et = frame_matrix_t(sh, ct, ex);
  Mat E = values(Et);
  Mat Th = coframe_matrix(sh, values(ct));
  // dE[L](K, A) = d E(K, A) / d u^L
  std::vector<Mat> dE(D, Mat(D, D, 0.0));
  for (int K = 0; K < D; ++K)
    for (int A = 0; A < D; ++A) {
      const Taylor& e = Et(K, A);
      if (e.sd == 0) continue;
      for (int L = 0; L < D; ++L) dE[L](K, A) = e.coef(ex.sp->var_index(L));
    }
  std::vector<double> c(static_cast<std::size_t>(D) * D * D, 0.0);
  std::vector<double> br(D);
  for (int A = 0; A < D; ++A)
    for (int B = A + 1; B < D; ++B) {
      for (int K = 0; K < D; ++K) {
        double s = 0.0;
        for (int L = 0; L < D; ++L) s += E(L, A) * dE[L](K, B) - E(L, B) * dE[L](K, A);
        br[K] = s;
      }
      for (int C = 0; C < D; ++C) {
        double s = 0.0;
        for (int K = 0; K < D; ++K) s += Th(C, K) * br[K];
        c[(A * D + B) * D + C] = s;
        c[(B * D + A) * D + C] = -s;
      }
    }
  return c;
}

std::vector<std::vector<double>> liouville_d_vectors(const NonlinearConnection& N, const JetPoint& u) {
  ConnValues c = connection_values(N, u);
  return liouville_from(u.shape, c.M, u.u);
}

}  // namespace hk
