#include "hk/nlinear.hpp"

#include <cmath>

namespace hk {

namespace {

inline std::size_t ix(int n, int i, int j, int h) { return (static_cast<std::size_t>(i) * n + j) * n + h; }

DTensor to_dtensor(const std::vector<Taylor>& v, int n, std::vector<Slot> slots) {
  DTensor t(n, std::move(slots));
  for (std::size_t q = 0; q < v.size(); ++q) t.comp[q] = v[q].value();
  return t;
}

}  // namespace

std::vector<TMat> NLinCoeffs::omega() const {
  int n = gUp.r;
  int k = static_cast<int>(Cv.size()) + 1;
  Taylor z = gUp(0, 0) * 0.0;
  std::vector<TMat> w;
  for (int h = 0; h < n; ++h) {
    TMat m(n, n, z);
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q) m(i, q) = H[ix(n, i, q, h)];
    w.push_back(m);
  }
  for (int a = 1; a < k; ++a)
    for (int h = 0; h < n; ++h) {
      TMat m(n, n, z);
      for (int i = 0; i < n; ++i)
        for (int q = 0; q < n; ++q) m(i, q) = Cv[a - 1][ix(n, i, q, h)];
      w.push_back(m);
    }
  for (int h = 0; h < n; ++h) {
    TMat m(n, n, z);
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < n; ++q) m(i, q) = Cw[ix(n, q, i, h)];
    w.push_back(m);
  }
  return w;
}

int NLinearConnection::curvature_order() const {
  int lost = metric.hamiltonian ? 2 : 0;
  return std::max(2 + lost, N.value_order + 1);
}

NLinearConnection canonical_metrical(const MetricModel& g, const NonlinearConnection& N) {
  if (!(g.shape == N.shape)) throw ShapeError("metric and nonlinear connection live on different bundles");
  return NLinearConnection{g.shape, g, N};
}

NLinCoeffs canonical_coeffs(const NLinearConnection& D, const Expansion& ex) {
  const BundleShape& sh = ex.shape;
  int n = sh.n, k = sh.k;
  NLinCoeffs r;
  r.conn = D.N.eval(ex);
  r.gUp = D.metric.up_t(ex);
  r.gDown = inverse(r.gUp);
  Taylor z = ex.zero();

  // A[b][j][s][h] = delta g_sh / delta (block b, j), b = 0..k-1
  std::vector<std::vector<Taylor>> grads(n * n);
  for (int s = 0; s < n; ++s)
    for (int h = s; h < n; ++h) {
      grads[s * n + h] = adapted_gradient(sh, r.conn, r.gDown(s, h));
      grads[h * n + s] = grads[s * n + h];
    }
  auto dg = [&](int b, int j, int s, int h) -> const Taylor& { return grads[s * n + h][b * n + j]; };

  auto christoffel_block = [&](int b) {
    std::vector<Taylor> out(static_cast<std::size_t>(n) * n * n, z);
    for (int j = 0; j < n; ++j)
      for (int h = j; h < n; ++h) {
        std::vector<Taylor> low;
        for (int s = 0; s < n; ++s) low.push_back((dg(b, j, s, h) + dg(b, h, j, s) - dg(b, s, j, h)) * 0.5);
        for (int i = 0; i < n; ++i) {
          Taylor acc = z;
          for (int s = 0; s < n; ++s) acc = acc + r.gUp(i, s) * low[s];
          out[ix(n, i, j, h)] = acc;
          out[ix(n, i, h, j)] = acc;
        }
      }
    return out;
  };
  r.H = christoffel_block(0);
  for (int a = 1; a < k; ++a) r.Cv.push_back(christoffel_block(a));

  // momentum derivatives of g^{ij}
  std::vector<Taylor> dp(static_cast<std::size_t>(n) * n * n, z);  // [h][i][j] = d^h g^{ij}
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int h = 0; h < n; ++h) dp[ix(n, h, i, j)] = dp[ix(n, h, j, i)] = d(r.gUp(i, j), sh.p(h));
  r.Cw.assign(static_cast<std::size_t>(n) * n * n, z);
  for (int j = 0; j < n; ++j)
    for (int h = j; h < n; ++h) {
      std::vector<Taylor> up;
      for (int s = 0; s < n; ++s) up.push_back(dp[ix(n, j, s, h)] + dp[ix(n, h, j, s)] - dp[ix(n, s, j, h)]);
      for (int i = 0; i < n; ++i) {
        Taylor acc = z;
        for (int s = 0; s < n; ++s) acc = acc + r.gDown(i, s) * up[s];
        r.Cw[ix(n, i, j, h)] = acc * -0.5;
        r.Cw[ix(n, i, h, j)] = r.Cw[ix(n, i, j, h)];
      }
    }
  return r;
}

NLinValues coefficient_values(const NLinearConnection& D, const JetPoint& u) {
  int lost = D.metric.hamiltonian ? 2 : 0;
  Expansion ex(u.shape, u.u, std::max(1 + lost, D.N.value_order));
  NLinCoeffs c = canonical_coeffs(D, ex);
  int n = u.shape.n, k = u.shape.k;
  NLinValues v;
  v.H = to_dtensor(c.H, n, {{Variance::Up, 0}, {Variance::Down, 0}, {Variance::Down, 0}});
  for (int a = 1; a < k; ++a) v.Cv.push_back(to_dtensor(c.Cv[a - 1], n, {{Variance::Up, a}, {Variance::Down, a}, {Variance::Down, a}}));
  v.Cw = to_dtensor(c.Cw, n, {{Variance::Down, k}, {Variance::Up, k}, {Variance::Up, k}});
  return v;
}

TField metric_up_field(const MetricModel& g) {
  TField t;
  t.n = g.shape.n;
  t.slots = {{Variance::Up, g.shape.k}, {Variance::Up, g.shape.k}};
  t.comps = [g](const Expansion& ex) { return g.up_t(ex).a; };
  return t;
}

TField metric_down_field(const MetricModel& g) {
  TField t;
  t.n = g.shape.n;
  t.slots = {{Variance::Down, 0}, {Variance::Down, 0}};
  t.comps = [g](const Expansion& ex) { return inverse(g.up_t(ex)).a; };
  return t;
}

TField momentum_field(const BundleShape& sh) {
  TField t;
  t.n = sh.n;
  t.slots = {{Variance::Down, sh.k}};
  t.comps = [sh](const Expansion& ex) {
    return std::vector<Taylor>(ex.X.begin() + sh.p(0), ex.X.begin() + sh.p(0) + sh.n);
  };
  return t;
}

TField liouville_field(const NonlinearConnection& N, int a) {
  TField t;
  t.n = N.shape.n;
  t.slots = {{Variance::Up, a}};
  t.comps = [N, a](const Expansion& ex) {
    ConnCoeffs c = N.eval(ex);
    return liouville_from(ex.shape, c.M, ex.X)[a - 1];
  };
  return t;
}

TField kronecker_field(const BundleShape& sh) {
  TField t;
  t.n = sh.n;
  t.slots = {{Variance::Up, 0}, {Variance::Down, 0}};
  t.comps = [sh](const Expansion& ex) {
    std::vector<Taylor> v(static_cast<std::size_t>(sh.n) * sh.n, ex.zero());
    for (int i = 0; i < sh.n; ++i) v[i * sh.n + i] = ex.cst(1.0);
    return v;
  };
  return t;
}

TField tensor_product(const TField& a, const TField& b) {
  TField t;
  t.n = a.n;
  t.slots = a.slots;
  t.slots.insert(t.slots.end(), b.slots.begin(), b.slots.end());
  t.comps = [a, b](const Expansion& ex) {
    auto x = a.comps(ex), y = b.comps(ex);
    std::vector<Taylor> r;
    for (const auto& p : x)
      for (const auto& q : y) r.push_back(p * q);
    return r;
  };
  return t;
}

DTensor covariant_derivative(const NLinearConnection& D, const TField& T, Direction dir, int a, const JetPoint& u) {
  const BundleShape& sh = u.shape;
  int n = sh.n, k = sh.k;
  if (T.n != n) throw ShapeError("tensor field dimension differs from the connection");
  int block = dir == Direction::H ? 0 : dir == Direction::W ? k : a;
  if (dir == Direction::V && (a < 1 || a >= k)) throw ShapeError("vertical direction index out of range");
  Expansion ex(sh, u.u, D.curvature_order());
  NLinCoeffs c = canonical_coeffs(D, ex);
  ConnValues cv = values(c.conn);
  std::vector<TMat> om = c.omega();
  std::vector<Taylor> comps = T.comps(ex);
  int rank = static_cast<int>(T.slots.size());
  std::size_t count = comps.size();
  for (const auto& s : T.slots)
    if (s.block < 0 || s.block > k) throw ShapeError("tensor slot has an invalid block label");

  std::vector<Slot> slots = T.slots;
  slots.push_back({dir == Direction::W ? Variance::Up : Variance::Down, block});
  DTensor out(n, slots);

  // adapted derivative values of every component
  std::vector<std::vector<double>> adg(count);
  for (std::size_t q = 0; q < count; ++q) {
    std::vector<double> g(sh.dim());
    for (int L = 0; L < sh.dim(); ++L) g[L] = comps[q].coef(ex.sp->var_index(L));
    adg[q] = adapted_from_natural(sh, cv, g);
  }
  std::vector<int> idx(rank);
  for (int h = 0; h < n; ++h) {
    int A = block * n + h;
    Mat w = values(om[A]);
    for (std::size_t q = 0; q < count; ++q) {
      std::size_t rem = q;
      for (int s = rank - 1; s >= 0; --s) {
        idx[s] = static_cast<int>(rem % n);
        rem /= n;
      }
      double acc = adg[q][A];
      for (int s = 0; s < rank; ++s) {
        std::size_t stride = 1;
        for (int t = s + 1; t < rank; ++t) stride *= n;
        std::size_t base = q - idx[s] * stride;
        for (int m = 0; m < n; ++m) {
          double tv = comps[base + m * stride].value();
          if (T.slots[s].var == Variance::Up)
            acc += w(idx[s], m) * tv;
          else
            acc -= w(m, idx[s]) * tv;
        }
      }
      out.comp[q * n + h] = acc;
    }
  }
  return out;
}

Deflections deflection_tensors(const NLinearConnection& D, const JetPoint& u) {
  const BundleShape& sh = u.shape;
  int n = sh.n, k = sh.k;
  NLinValues v = coefficient_values(D, u);
  ConnValues cv = connection_values(D.N, u);
  Deflections r;
  r.Delta = DTensor(n, {{Variance::Down, k}, {Variance::Down, 0}});
  r.dw = DTensor(n, {{Variance::Down, k}, {Variance::Up, k}});
  for (int a = 1; a < k; ++a) r.dv.push_back(DTensor(n, {{Variance::Down, k}, {Variance::Down, a}}));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double sH = 0.0, sW = 0.0;
      for (int h = 0; h < n; ++h) {
        sH += u.p(h) * v.H.at({h, i, j});
        sW += u.p(h) * v.Cw.at({i, h, j});
      }
      r.Delta.at({i, j}) = cv.Nlow(j, i) - sH;
      r.dw.at({i, j}) = (i == j ? 1.0 : 0.0) - sW;
      for (int a = 1; a < k; ++a) {
        double s = 0.0;
        for (int h = 0; h < n; ++h) s += u.p(h) * v.Cv[a - 1].at({h, i, j});
        r.dv[a - 1].at({i, j}) = -s;
      }
    }
  return r;
}

CurvaturePack curvature(const NLinearConnection& D, const JetPoint& u) {
  const BundleShape& sh = u.shape;
  int n = sh.n, Dm = sh.dim();
  Expansion ex(sh, u.u, D.curvature_order());
  NLinCoeffs c = canonical_coeffs(D, ex);
  ConnValues cv = values(c.conn);
  Mat E = frame_matrix(sh, cv);
  std::vector<TMat> om = c.omega();

  // brackets from the same expansion
  TMat Et = frame_matrix_t(sh, c.conn, ex);
  Mat Th = coframe_matrix(sh, cv);
  std::vector<Mat> dE(Dm, Mat(Dm, Dm, 0.0));
  for (int K = 0; K < Dm; ++K)
    for (int A = 0; A < Dm; ++A)
      if (Et(K, A).sd > 0)
        for (int L = 0; L < Dm; ++L) dE[L](K, A) = Et(K, A).coef(ex.sp->var_index(L));

  // values and adapted derivatives of omega
  std::vector<Mat> w0(Dm, Mat(n, n, 0.0));
  // Xw[A][B](i,m) = X_A omega_B
  std::vector<std::vector<Mat>> Xw(Dm, std::vector<Mat>(Dm, Mat(n, n, 0.0)));
  for (int B = 0; B < Dm; ++B)
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m) {
        const Taylor& t = om[B](i, m);
        if (t.deg < 1) throw std::logic_error("connection coefficients lack the derivative depth curvature needs");
        w0[B](i, m) = t.value();
        if (t.sd == 0) continue;
        std::vector<double> g(Dm);
        for (int L = 0; L < Dm; ++L) g[L] = t.coef(ex.sp->var_index(L));
        for (int A = 0; A < Dm; ++A) {
          double s = 0.0;
          for (int L = 0; L < Dm; ++L) s += E(L, A) * g[L];
          Xw[A][B](i, m) = s;
        }
      }

  CurvaturePack cp;
  cp.shape = sh;
  cp.gUp = values(c.gUp);
  cp.omega.assign(static_cast<std::size_t>(Dm) * Dm * n * n, 0.0);
  std::vector<double> br(Dm), cc(Dm);
  for (int A = 0; A < Dm; ++A)
    for (int B = A + 1; B < Dm; ++B) {
      for (int K = 0; K < Dm; ++K) {
        double s = 0.0;
        for (int L = 0; L < Dm; ++L) s += E(L, A) * dE[L](K, B) - E(L, B) * dE[L](K, A);
        br[K] = s;
      }
      for (int C = 0; C < Dm; ++C) {
        double s = 0.0;
        for (int K = 0; K < Dm; ++K) s += Th(C, K) * br[K];
        cc[C] = s;
      }
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) {
          double s = Xw[A][B](i, m) - Xw[B][A](i, m);
          for (int q = 0; q < n; ++q) s += w0[A](i, q) * w0[B](q, m) - w0[B](i, q) * w0[A](q, m);
          for (int C = 0; C < Dm; ++C) s -= cc[C] * w0[C](i, m);
          cp.omega[((static_cast<std::size_t>(A) * Dm + B) * n + i) * n + m] = s;
          cp.omega[((static_cast<std::size_t>(B) * Dm + A) * n + i) * n + m] = -s;
        }
    }
  return cp;
}

double CurvaturePack::at(int A, int B, int i, int m) const {
  int n = shape.n, Dm = shape.dim();
  return omega[((static_cast<std::size_t>(A) * Dm + B) * n + i) * n + m];
}
double CurvaturePack::R(int m, int i, int j, int h) const { return at(shape.x(h), shape.x(j), i, m); }
double CurvaturePack::P(int a, int m, int i, int j, int h) const { return at(shape.y(a, h), shape.x(j), i, m); }
double CurvaturePack::Pw(int m, int i, int j, int h) const { return at(shape.p(h), shape.x(j), i, m); }
double CurvaturePack::S(int a, int b, int m, int i, int j, int h) const { return at(shape.y(b, h), shape.y(a, j), i, m); }
double CurvaturePack::Sv(int a, int m, int i, int j, int h) const { return at(shape.p(h), shape.y(a, j), i, m); }
double CurvaturePack::Sfull(int m, int i, int j, int h) const { return at(shape.p(h), shape.p(j), i, m); }

double CurvaturePack::metric_antisymmetry_defect() const {
  int n = shape.n, Dm = shape.dim();
  double worst = 0.0;
  for (int A = 0; A < Dm; ++A)
    for (int B = 0; B < Dm; ++B)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int q = 0; q < n; ++q) s += at(A, B, i, q) * gUp(q, j) + at(A, B, j, q) * gUp(q, i);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double CurvaturePack::pair_antisymmetry_defect() const {
  int n = shape.n, Dm = shape.dim();
  double worst = 0.0;
  for (int A = 0; A < Dm; ++A)
    for (int B = 0; B < Dm; ++B)
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) worst = std::max(worst, std::abs(at(A, B, i, m) + at(B, A, i, m)));
  return worst;
}

}  // namespace hk
