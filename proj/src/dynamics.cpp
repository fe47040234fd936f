#include "hk/dynamics.hpp"

#include <cmath>

namespace hk {

double poisson_bracket(const ScalarField& f, const ScalarField& g, int a, const JetPoint& u) {
  const BundleShape& sh = u.shape;
  if (a < 0 || a >= sh.k) throw ShapeError("Poisson bracket index must lie in 0..k-1");
  auto df = gradient(f, u), dg = gradient(g, u);
  double s = 0.0;
  for (int i = 0; i < sh.n; ++i) s += df[a * sh.n + i] * dg[sh.p(i)] - df[sh.p(i)] * dg[a * sh.n + i];
  return s;
}

ScalarField poisson_field(const ScalarField& f, const ScalarField& g, int a) {
  const BundleShape sh = f.shape;
  if (a < 0 || a >= sh.k) throw ShapeError("Poisson bracket index must lie in 0..k-1");
  auto br = [f, g, a, sh](const auto& u) {
    auto df = grad_at(f, u), dg = grad_at(g, u);
    auto s = zero_like(u[0]);
    for (int i = 0; i < sh.n; ++i) s = s + df[a * sh.n + i] * dg[sh.p(i)] - df[sh.p(i)] * dg[a * sh.n + i];
    return s;
  };
  ScalarField r;
  r.shape = sh;
  r.name = "{" + f.name + ", " + g.name + "}";
  r.f.d = [br](const std::vector<double>& u) { return br(u); };
  r.f.t = [br](const std::vector<Taylor>& u) { return br(u); };
  return r;
}

std::vector<double> sigma0_field(const ScalarField& f, const JetPoint& u) {
  const BundleShape& sh = u.shape;
  JetPoint v = u;
  for (int a = 1; a < sh.k; ++a)
    for (int i = 0; i < sh.n; ++i) v.u[sh.y(a, i)] = 0.0;
  auto g = gradient(f, v);
  std::vector<double> X(2 * sh.n);
  for (int i = 0; i < sh.n; ++i) {
    X[i] = g[sh.p(i)];
    X[sh.n + i] = -g[sh.x(i)];
  }
  return X;
}

double theta0(const std::vector<double>& X, const std::vector<double>& Y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += X[n + i] * Y[i] - X[i] * Y[n + i];
  return s;
}

// ---- germs ----

int CurveGerm::depth() const {
  std::size_t L = x.empty() ? 0 : x[0].size(), Lp = p.empty() ? 0 : p[0].size();
  for (const auto& c : x) L = std::min(L, c.size());
  for (const auto& c : p) Lp = std::min(Lp, c.size());
  return std::min(static_cast<int>(L) - shape.k, static_cast<int>(Lp) - 1);
}

namespace {

double binom(int n, int r) {
  double b = 1.0;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Taylor poly(const TaylorSpace* sp, const std::vector<double>& c) {
  Taylor t = Taylor::variable(sp, 0, 0.0);
  Taylor acc = Taylor::constant(sp, 0.0), tp = Taylor::constant(sp, 1.0);
  for (std::size_t m = 0; m < c.size() && static_cast<int>(m) <= sp->order(); ++m) {
    acc = acc + tp * c[m];
    tp = tp * t;
  }
  return acc;
}

// d^r/dt^r at t = 0 of a one-variable series
double dt_at0(const Taylor& s, int r) { return s.coef(r) * factorial(r); }

}  // namespace

JetPoint CurveGerm::point() const {
  int n = shape.n;
  std::vector<double> u(shape.dim(), 0.0);
  for (int i = 0; i < n; ++i) {
    u[shape.x(i)] = x[i].at(0);
    for (int a = 1; a < shape.k; ++a) u[shape.y(a, i)] = x[i].at(a);  // x^(a)/a! is the t^a coefficient
    u[shape.p(i)] = p[i].at(0);
  }
  return JetPoint(shape, u);
}

std::vector<Taylor> CurveGerm::series() const {
  int dep = depth();
  if (dep < 0) throw ShapeError("curve germ too short for the bundle order");
  const TaylorSpace* sp = TaylorSpace::get(1, dep);
  int n = shape.n;
  std::vector<Taylor> u(shape.dim());
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < shape.k; ++a) {
      std::vector<double> c(dep + 1);
      for (int m = 0; m <= dep; ++m) c[m] = binom(m + a, a) * x[i][m + a];
      u[a * n + i] = poly(sp, c);
    }
  for (int i = 0; i < n; ++i) u[shape.p(i)] = poly(sp, std::vector<double>(p[i].begin(), p[i].begin() + dep + 1));
  return u;
}

bool EnergyReport::zermelo_all() const {
  for (bool b : zermelo)
    if (!b) return false;
  return true;
}

EnergyReport invariants_and_energies(const ScalarField& H, const CurveGerm& c, double tol) {
  const BundleShape& sh = c.shape;
  int k = sh.k;
  if (c.depth() < k - 2) throw ShapeError("curve germ too short for the energies");
  std::vector<Taylor> u = c.series();
  EnergyReport r;
  JetPoint u0 = c.point();
  r.H = H(u0);
  std::vector<Taylor> I;
  for (int a = 1; a < k; ++a) {
    I.push_back(main_invariant(H, sh, u, a));
    r.I.push_back(I.back().value());
  }
  double scale = std::max(1.0, std::abs(r.H));
  for (int a = 1; a < k; ++a) {
    double want = a == k - 1 ? r.H : 0.0;
    r.zermelo.push_back(std::abs(r.I[a - 1] - want) <= tol * scale);
  }
  // E^m = sum_{j=1}^{m} (-1)^{k-1-j}/(k-j)! d^{m-j}/dt^{m-j} I^j, minus H for m = k-1
  for (int m = 1; m < k; ++m) {
    double s = 0.0;
    for (int j = 1; j <= m; ++j) s += ((k - 1 - j) % 2 ? -1.0 : 1.0) / factorial(k - j) * dt_at0(I[j - 1], m - j);
    if (m == k - 1) s -= r.H;
    r.E.push_back(s);
  }
  return r;
}

std::vector<std::vector<double>> jacobi_ostrogradski(const ScalarField& H, const CurveGerm& c) {
  const BundleShape& sh = c.shape;
  int n = sh.n, k = sh.k;
  if (c.depth() < k - 2) throw ShapeError("curve germ too short for the momenta");
  std::vector<Taylor> u = c.series();
  std::vector<Taylor> g = grad_at(H, u);
  std::vector<std::vector<double>> P;
  for (int a = 1; a < k; ++a) {
    std::vector<double> pa(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = a; j < k; ++j)
        pa[i] += ((j - a) % 2 ? -1.0 : 1.0) / factorial(j) * dt_at0(g[sh.y(j, i)], j - a);
    P.push_back(pa);
  }
  return P;
}

double energy_from_momenta(const ScalarField& H, const CurveGerm& c) {
  auto P = jacobi_ostrogradski(H, c);
  double s = -H(c.point());
  for (int a = 1; a < c.shape.k; ++a)
    for (int i = 0; i < c.shape.n; ++i) s += P[a - 1][i] * c.x[i][a] * factorial(a);
  return s;
}

// ---- Hamilton-Jacobi ----

namespace {

JetPoint state_point(const BundleShape& sh, const std::vector<double>& s) {
  std::vector<double> u(sh.dim(), 0.0);
  for (int i = 0; i < sh.n; ++i) {
    u[sh.x(i)] = s[i];
    u[sh.y(1, i)] = s[sh.n + i];
    u[sh.p(i)] = s[2 * sh.n + i];
  }
  return JetPoint(sh, u);
}

}  // namespace

void require_y1_only(const ScalarField& H, const JetPoint& u) {
  auto g = gradient(H, u);
  Taylor t = expand(H, u, 2);
  const BundleShape& sh = u.shape;
  for (int a = 2; a < sh.k; ++a)
    for (int i = 0; i < sh.n; ++i) {
      bool dep = g[sh.y(a, i)] != 0.0;
      for (int v = 0; v < sh.dim() && !dep; ++v) dep = t.partial({sh.y(a, i), v}) != 0.0;
      if (dep)
        throw NotSupported("Hamilton-Jacobi integration supports dependence on y(1) only; " + H.name +
                           " depends on y(" + std::to_string(a) + ")");
    }
}

std::vector<double> consistent_velocity(const ScalarField& H, const std::vector<double>& x, const std::vector<double>& p) {
  const BundleShape& sh = H.shape;
  int n = sh.n;
  std::vector<double> s(3 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    s[i] = x[i];
    s[2 * n + i] = p[i];
  }
  for (int it = 0; it < 50; ++it) {
    JetPoint u = state_point(sh, s);
    Taylor t;
    try {
      t = expand(H, u, 2);
    } catch (const DomainError&) {
      // singular at v = 0 (a Cartan H of order 2): start from v = p instead
      if (it != 0) throw;
      for (int i = 0; i < n; ++i) s[n + i] = p[i];
      t = expand(H, state_point(sh, s), 2);
    }
    Mat J(n, n, 0.0), F(n, 1, 0.0);
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      F(i, 0) = s[n + i] - 0.5 * t.partial({sh.p(i)});
      res = std::max(res, std::abs(F(i, 0)));
      for (int j = 0; j < n; ++j) J(i, j) = (i == j ? 1.0 : 0.0) - 0.5 * t.partial({sh.p(i), sh.y(1, j)});
    }
    if (res < 1e-13) break;
    Mat dv = solve(J, F);
    for (int i = 0; i < n; ++i) s[n + i] -= dv(i, 0);
    if (it == 49 && res > 1e-10) throw DegeneracyError("no consistent velocity dx/dt = 1/2 dH/dp");
  }
  return std::vector<double>(s.begin() + n, s.begin() + 2 * n);
}

double hj_energy(const ScalarField& H, const std::vector<double>& s) {
  const BundleShape& sh = H.shape;
  JetPoint u = state_point(sh, s);
  auto g = gradient(H, u);
  double e = -H(u);
  for (int i = 0; i < sh.n; ++i) e += s[sh.n + i] * g[sh.y(1, i)];
  return e;
}

std::vector<double> rk4_step(const OdeRhs& f, const std::vector<double>& s, double h) {
  auto axpy = [](const std::vector<double>& a, const std::vector<double>& b, double c) {
    std::vector<double> r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * b[i];
    return r;
  };
  auto k1 = f(s);
  auto k2 = f(axpy(s, k1, h / 2));
  auto k3 = f(axpy(s, k2, h / 2));
  auto k4 = f(axpy(s, k3, h));
  std::vector<double> r = s;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return r;
}

std::vector<double> rk4_flow(const OdeRhs& f, std::vector<double> s, double t1, double step) {
  long steps = std::max(1L, std::lround(t1 / step));
  double h = t1 / steps;
  for (long i = 0; i < steps; ++i) s = rk4_step(f, s, h);
  return s;
}

Trajectory integrate_hj(const ScalarField& H, const std::vector<double>& x0, const std::vector<double>& p0, double t1,
                        double step) {
  const BundleShape& sh = H.shape;
  int n = sh.n;
  if (!(step > 0.0) || !(t1 > 0.0)) throw DomainError("integration needs positive step and end time");
  if (static_cast<int>(x0.size()) != n || static_cast<int>(p0.size()) != n) throw ShapeError("initial data has wrong size");
  Trajectory tr;
  tr.k = sh.k;
  tr.method = "rk4";
  long steps = std::max(1L, std::lround(t1 / step));
  double h = t1 / steps;
  tr.step = h;
  std::vector<double> s(3 * n);
  auto v0 = consistent_velocity(H, x0, p0);
  for (int i = 0; i < n; ++i) {
    s[i] = x0[i];
    s[n + i] = v0[i];
    s[2 * n + i] = p0[i];
  }
  OdeRhs f = [&H](const std::vector<double>& z) { return hj_rhs(H, z); };
  auto record = [&](double t) {
    JetPoint u = state_point(sh, s);
    require_y1_only(H, u);
    double e = hj_energy(H, s);
    auto g = gradient(H, u);
    for (int i = 0; i < n; ++i) tr.consistency = std::max(tr.consistency, std::abs(s[n + i] - 0.5 * g[sh.p(i)]));
    tr.samples.push_back(
        {t, std::vector<double>(s.begin(), s.begin() + n), std::vector<double>(s.begin() + 2 * n, s.end()), e});
    tr.drift = std::max(tr.drift, std::abs(e - tr.samples.front().E));
  };
  try {
    record(0.0);
    for (long i = 0; i < steps; ++i) {
      s = rk4_step(f, s, h);
      record((i + 1) * h);
    }
  } catch (const NotSupported&) {
    throw;
  } catch (const std::exception& e) {
    tr.failure = tr.samples.size();
    tr.failure_msg = e.what();
  }
  return tr;
}

std::vector<double> taylor_flow(const ScalarField& H, std::vector<double> s, double t1, double step, int order) {
  long steps = std::max(1L, std::lround(t1 / step));
  double h = t1 / steps;
  const TaylorSpace* sp = TaylorSpace::get(1, order);
  for (long st = 0; st < steps; ++st) {
    std::vector<Taylor> z;
    for (double v : s) z.push_back(Taylor::constant(sp, v));
    // Picard iteration gains one exact coefficient per pass
    for (int it = 0; it <= order; ++it) {
      auto f = hj_rhs(H, z);
      for (std::size_t q = 0; q < s.size(); ++q) {
        std::vector<double> c(order + 1, 0.0);
        c[0] = s[q];
        for (int m = 0; m < order; ++m) c[m + 1] = f[q].coef(m) / (m + 1);
        z[q] = poly(sp, c);
      }
    }
    for (std::size_t q = 0; q < s.size(); ++q) {
      double acc = 0.0;
      for (int m = order; m >= 0; --m) acc = acc * h + z[q].coef(m);
      s[q] = acc;
    }
  }
  return s;
}

// ---- paths ----

namespace {

struct PathData {
  NLinValues c;
  ConnValues conn;
};

PathData path_data(const NLinearConnection& D, const JetPoint& u) { return {coefficient_values(D, u), connection_values(D.N, u)}; }

}  // namespace

std::vector<double> horizontal_rhs(const NLinearConnection& D, const std::vector<double>& st) {
  const BundleShape& sh = D.shape;
  int n = sh.n, k = sh.k;
  // state: x, xdot, y(1..k-1), p
  std::vector<double> u(sh.dim());
  for (int i = 0; i < n; ++i) u[sh.x(i)] = st[i];
  for (int q = 0; q < (k - 1) * n; ++q) u[n + q] = st[2 * n + q];
  for (int i = 0; i < n; ++i) u[sh.p(i)] = st[(k + 1) * n + i];
  PathData pd = path_data(D, JetPoint(sh, u));
  std::vector<double> r(st.size(), 0.0);
  const double* xd = &st[n];
  for (int i = 0; i < n; ++i) {
    r[i] = xd[i];
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int h = 0; h < n; ++h) s += pd.c.H.at({i, j, h}) * xd[j] * xd[h];
    r[n + i] = -s;
  }
  // delta y(a)/dt = 0: ydot(a) = -sum_b M(b) ydot(a-b), ydot(0) = xdot
  std::vector<std::vector<double>> yd(k, std::vector<double>(n, 0.0));
  yd[0].assign(xd, xd + n);
  for (int a = 1; a < k; ++a) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int b = 1; b <= a; ++b)
        for (int j = 0; j < n; ++j) s += pd.conn.M[b - 1](i, j) * yd[a - b][j];
      yd[a][i] = -s;
      r[2 * n + (a - 1) * n + i] = -s;
    }
  }
  // delta p/dt = 0: pdot_i = N_ji xdot^j
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += pd.conn.Nlow(j, i) * xd[j];
    r[(k + 1) * n + i] = s;
  }
  return r;
}

std::vector<double> autoparallel_rhs(const NLinearConnection& D, const std::vector<double>& st) {
  const BundleShape& sh = D.shape;
  int n = sh.n, k = sh.k, Dm = sh.dim();
  std::vector<double> u(st.begin(), st.begin() + Dm), ud(st.begin() + Dm, st.end());
  JetPoint pt(sh, u);
  NLinValues c = coefficient_values(D, pt);
  Expansion ex(sh, u, D.N.value_order + 1);
  ConnCoeffs ct = D.N.eval(ex);
  ConnValues cv = values(ct);
  // time derivatives of the connection coefficients along udot
  auto dot = [&](const Taylor& t) {
    if (t.sd == 0) return 0.0;
    double s = 0.0;
    for (int L = 0; L < Dm; ++L) s += t.coef(ex.sp->var_index(L)) * ud[L];
    return s;
  };
  auto xd = [&](int i) { return ud[sh.x(i)]; };
  auto ydot = [&](int a, int i) { return ud[a * n + i]; };
  // Y(a) = delta y(a)/dt, P = delta p/dt
  std::vector<std::vector<double>> Y(k, std::vector<double>(n, 0.0));
  for (int a = 1; a < k; ++a)
    for (int i = 0; i < n; ++i) {
      double s = ydot(a, i);
      for (int b = 1; b <= a; ++b)
        for (int j = 0; j < n; ++j) s += cv.M[b - 1](i, j) * ydot(a - b, j);
      Y[a][i] = s;
    }
  std::vector<double> P(n);
  for (int i = 0; i < n; ++i) {
    double s = ud[sh.p(i)];
    for (int j = 0; j < n; ++j) s -= cv.Nlow(j, i) * xd(j);
    P[i] = s;
  }
  // W(i, s) = omega_s^i / dt
  Mat W(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int s = 0; s < n; ++s) {
      double w = 0.0;
      for (int h = 0; h < n; ++h) {
        w += c.H.at({i, s, h}) * xd(h);
        for (int a = 1; a < k; ++a) w += c.Cv[a - 1].at({i, s, h}) * Y[a][h];
        w += c.Cw.at({s, i, h}) * P[h];
      }
      W(i, s) = w;
    }
  std::vector<std::vector<double>> ydd(k, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int q = 0; q < n; ++q) s += xd(q) * W(i, q);
    ydd[0][i] = -s;
  }
  for (int a = 1; a < k; ++a)
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int q = 0; q < n; ++q) s -= Y[a][q] * W(i, q);
      for (int b = 1; b <= a; ++b)
        for (int j = 0; j < n; ++j) s -= dot(ct.M[b - 1](i, j)) * ydot(a - b, j) + cv.M[b - 1](i, j) * ydd[a - b][j];
      ydd[a][i] = s;
    }
  std::vector<double> r(2 * Dm, 0.0);
  for (int L = 0; L < Dm; ++L) r[L] = ud[L];
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < n; ++i) r[Dm + a * n + i] = ydd[a][i];
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int q = 0; q < n; ++q) s += P[q] * W(q, i);
    for (int j = 0; j < n; ++j) s += dot(ct.Nlow(j, i)) * xd(j) + cv.Nlow(j, i) * ydd[0][j];
    r[Dm + sh.p(i)] = s;
  }
  return r;
}

std::vector<double> vertical_rhs(const NLinearConnection& D, int a, const std::vector<double>& st) {
  const BundleShape& sh = D.shape;
  int n = sh.n, Dm = sh.dim();
  if (a < 1 || a >= sh.k) throw ShapeError("vertical path index out of range");
  std::vector<double> u(st.begin(), st.begin() + Dm);
  NLinValues c = coefficient_values(D, JetPoint(sh, u));
  std::vector<double> r(Dm + n, 0.0);
  for (int i = 0; i < n; ++i) {
    r[sh.y(a, i)] = st[Dm + i];
    double s = 0.0;
    for (int q = 0; q < n; ++q)
      for (int j = 0; j < n; ++j) s += c.Cv[a - 1].at({i, q, j}) * st[Dm + q] * st[Dm + j];
    r[Dm + i] = -s;
  }
  return r;
}

std::vector<double> wpath_rhs(const NLinearConnection& D, const std::vector<double>& st) {
  const BundleShape& sh = D.shape;
  int n = sh.n, Dm = sh.dim();
  std::vector<double> u(st.begin(), st.begin() + Dm);
  NLinValues c = coefficient_values(D, JetPoint(sh, u));
  std::vector<double> r(Dm + n, 0.0);
  for (int i = 0; i < n; ++i) {
    r[sh.p(i)] = st[Dm + i];
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) s += c.Cw.at({i, j, m}) * st[Dm + j] * st[Dm + m];
    r[Dm + i] = s;
  }
  return r;
}

}  // namespace hk
