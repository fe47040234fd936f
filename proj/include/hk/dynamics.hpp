#pragma once
// Hamilton-Jacobi dynamics, main invariants and energies, Jacobi-Ostrogradski
// momenta, Poisson brackets and the path families of an N-linear connection.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hk/field.hpp"
#include "hk/nlinear.hpp"

namespace hk {

// ---- Poisson structures ----

// {f,g}_a = df/dy(a).dg/dp - df/dp.dg/dy(a), with y(0) = x
double poisson_bracket(const ScalarField& f, const ScalarField& g, int a, const JetPoint& u);

// {f,g}_a as a field (double and Taylor levels), so brackets can be nested
ScalarField poisson_field(const ScalarField& f, const ScalarField& g, int a);

// Hamiltonian vector field of f on the null section y = 0, in (x, p)
// components: X_f = df/dp d/dx - df/dx d/dp. u is projected to y = 0.
std::vector<double> sigma0_field(const ScalarField& f, const JetPoint& u);
// theta_0 = dp ^ dx on (x, p) component vectors: theta(X, Y) = X_p.Y_x - X_x.Y_p
double theta0(const std::vector<double>& X, const std::vector<double>& Y, int n);

// ---- gradients at any scalar level ----

// first partials of f at a point whose coordinates are themselves of type S
template <class S>
std::vector<S> grad_at(const ScalarField& f, const std::vector<S>& u) {
  int D = static_cast<int>(u.size());
  const TaylorSpace* sp = TaylorSpace::get(D, 1);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < D; ++i) X.push_back(TaylorT<S>::variable(sp, i, u[i]));
  TaylorT<S> t = f(X);
  std::vector<S> g;
  for (int i = 0; i < D; ++i) g.push_back(t.coef(sp->var_index(i)));
  return g;
}

// ---- curve germs and energies ----

// A curve x(t), p(t) given by Taylor coefficients at t = 0:
// x[i][m] is the t^m coefficient of x^i(t), likewise p.
struct CurveGerm {
  BundleShape shape;
  std::vector<std::vector<double>> x, p;
  // the lifted point (x, x'/1!, ..., x^(k-1)/(k-1)!, p) at t = 0
  JetPoint point() const;
  // number of t-derivatives of every lifted coordinate that the germ fixes
  int depth() const;
  // lifted coordinates as series in t, truncated at depth()
  std::vector<Taylor> series() const;
};

// I^a(H) = L_{Gamma_a} H, Gamma_a = sum_{b=1}^{a} b y(b) d/dy(k-1-a+b)
template <class S>
S main_invariant(const ScalarField& H, const BundleShape& sh, const std::vector<S>& u, int a) {
  std::vector<S> g = grad_at(H, u);
  S s = zero_like(u[0]);
  for (int b = 1; b <= a; ++b)
    for (int i = 0; i < sh.n; ++i) s = s + u[sh.y(b, i)] * g[sh.y(sh.k - 1 - a + b, i)] * double(b);
  return s;
}

struct EnergyReport {
  std::vector<double> I;        // I^1 .. I^{k-1}
  std::vector<double> E;        // E^1 .. E^{k-1}
  std::vector<bool> zermelo;    // [a-1]: I^{k-1} = H for a = k-1, I^a = 0 otherwise
  double H = 0.0;
  double drift = 0.0;           // filled in for trajectories
  bool zermelo_all() const;
};

EnergyReport invariants_and_energies(const ScalarField& H, const CurveGerm& c, double zermelo_tol = 1e-8);

// p_(a)i = sum_{j=a}^{k-1} (-1)^{j-a} / j! d^{j-a}/dt^{j-a} dH/dy(j)i
std::vector<std::vector<double>> jacobi_ostrogradski(const ScalarField& H, const CurveGerm& c);
// sum_a p_(a) . d^a x/dt^a - H
double energy_from_momenta(const ScalarField& H, const CurveGerm& c);

// ---- Hamilton-Jacobi integration ----
//
// Supported for Hamiltonians whose fiber dependence is through y(1) and p
// only. State s = (x, v, p) with v = dx/dt = y(1); the system is closed by
// differentiating dx/dt = 1/2 dH/dp once in t, which gives a linear system
// for (dv/dt, dp/dt).

struct NotSupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
std::vector<S> hj_rhs(const ScalarField& H, const std::vector<S>& s) {
  const BundleShape& sh = H.shape;
  int n = sh.n, D = sh.dim();
  std::vector<S> u(D, zero_like(s[0]));
  for (int i = 0; i < n; ++i) {
    u[sh.x(i)] = s[i];
    u[sh.y(1, i)] = s[n + i];
    u[sh.p(i)] = s[2 * n + i];
  }
  const TaylorSpace* sp = TaylorSpace::get(D, 2);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < D; ++i) X.push_back(TaylorT<S>::variable(sp, i, u[i]));
  TaylorT<S> t = H(X);
  auto g1 = [&](int a) { return t.coef(sp->var_index(a)); };
  auto g2 = [&](int a, int b) {
    std::vector<int> e(D, 0);
    e[a]++;
    e[b]++;
    return t.coef(sp->index(e)) * sp->factorial_weight(sp->index(e));
  };
  SMat<S> A(2 * n, 2 * n, zero_like(s[0])), B(2 * n, 1, zero_like(s[0]));
  for (int i = 0; i < n; ++i) {
    // row i: (1/2 H_pv - I) vdot + 1/2 H_pp pdot = -1/2 H_px v
    // row n+i: -1/2 H_vv vdot + (I - 1/2 H_vp) pdot = -1/2 H_x + 1/2 H_vx v
    S rhs1 = zero_like(s[0]), rhs2 = g1(sh.x(i)) * -0.5;
    for (int j = 0; j < n; ++j) {
      A(i, j) = g2(sh.p(i), sh.y(1, j)) * 0.5 - (i == j ? 1.0 : 0.0);
      A(i, n + j) = g2(sh.p(i), sh.p(j)) * 0.5;
      A(n + i, j) = g2(sh.y(1, i), sh.y(1, j)) * -0.5;
      A(n + i, n + j) = g2(sh.y(1, i), sh.p(j)) * -0.5 + (i == j ? 1.0 : 0.0);
      rhs1 = rhs1 - g2(sh.p(i), sh.x(j)) * s[n + j] * 0.5;
      rhs2 = rhs2 + g2(sh.y(1, i), sh.x(j)) * s[n + j] * 0.5;
    }
    B(i, 0) = rhs1;
    B(n + i, 0) = rhs2;
  }
  SMat<S> sol = solve(A, B);
  std::vector<S> r(3 * n, zero_like(s[0]));
  for (int i = 0; i < n; ++i) {
    r[i] = s[n + i];
    r[n + i] = sol(i, 0);
    r[2 * n + i] = sol(n + i, 0);
  }
  return r;
}

// throws NotSupported if H depends on y(2..k-1) at u
void require_y1_only(const ScalarField& H, const JetPoint& u);
// v solving v = 1/2 dH/dp(x, v, p) by Newton from v = 1/2 dH/dp(x, 0, p)
std::vector<double> consistent_velocity(const ScalarField& H, const std::vector<double>& x, const std::vector<double>& p);
// state (x, v, p) -> E^{k-1} = v . dH/dy(1) - H (all other momenta vanish)
double hj_energy(const ScalarField& H, const std::vector<double>& s);

struct Sample {
  double t;
  std::vector<double> x, p;
  double E;
};

struct Trajectory {
  int k = 2;
  std::string method;
  double step = 0.0;
  std::vector<Sample> samples;
  std::optional<std::size_t> failure;  // index of the step that failed
  std::string failure_msg;
  double drift = 0.0;
  double consistency = 0.0;  // max |dx/dt - 1/2 dH/dp|
};

Trajectory integrate_hj(const ScalarField& H, const std::vector<double>& x0, const std::vector<double>& p0, double t1,
                        double step);

// Taylor-series time stepper of the given order on the same reduced system
// (independent of RK4; used as an oracle)
std::vector<double> taylor_flow(const ScalarField& H, std::vector<double> s, double t1, double step, int order);

// classical RK4 on a generic autonomous system
using OdeRhs = std::function<std::vector<double>(const std::vector<double>&)>;
std::vector<double> rk4_step(const OdeRhs& f, const std::vector<double>& s, double h);
std::vector<double> rk4_flow(const OdeRhs& f, std::vector<double> s, double t1, double step);

// ---- paths of an N-linear connection ----
//
// Full autoparallel system: state (u, udot), u a point of T*^k M.
std::vector<double> autoparallel_rhs(const NLinearConnection& D, const std::vector<double>& state);
// Horizontal paths: state (x, xdot, y(1..k-1), p)
std::vector<double> horizontal_rhs(const NLinearConnection& D, const std::vector<double>& state);
// v_a path at fixed x, other y, p: state (u, y(a)dot)
std::vector<double> vertical_rhs(const NLinearConnection& D, int a, const std::vector<double>& state);
// w_k path at fixed x, y: state (u, pdot)
std::vector<double> wpath_rhs(const NLinearConnection& D, const std::vector<double>& state);

}  // namespace hk
