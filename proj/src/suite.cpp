#include "hk/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "hk/structures.hpp"

namespace hk {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t stream_seed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) h = (h ^ c) * 1099511628211ULL;
  return h ^ (seed * 0x9e3779b97f4a7c15ULL);
}

struct Ctx {
  const Space& s;
  std::uint64_t seed;
  int points;
  IntegrateSpec integ;
  std::vector<Row>& rows;
};

class Check {
 public:
  Check(Ctx& c, std::string name, std::string prop, double tol, Compare cmp = Compare::AtMost, double hi = 0.0)
      : c_(c) {
    row_.check = std::move(name);
    row_.property = std::move(prop);
    row_.tol = tol;
    row_.hi = hi;
    row_.cmp = cmp;
    row_.seed = c.seed;
    row_.residual = cmp == Compare::Above ? std::numeric_limits<double>::infinity() : 0.0;
  }
  Check(const Check&) = delete;
  ~Check() { emit(); }

  void add(double r) {
    ++row_.points;
    if (!std::isfinite(r)) bad_ = true;
    if (row_.cmp == Compare::Above)
      row_.residual = std::min(row_.residual, r);
    else if (row_.cmp == Compare::Within)
      row_.residual = r;
    else
      row_.residual = std::max(row_.residual, r);
  }
  void error(int idx, const std::exception& e) {
    Row r = row_;
    r.point = idx;
    r.pass = false;
    r.residual = std::numeric_limits<double>::quiet_NaN();
    r.points = 1;
    r.note = e.what();
    errs_.push_back(r);
  }
  void skip(const std::string& why) {
    skip_ = true;
    row_.note = why;
  }
  void note(const std::string& n) { row_.note = n; }

 private:
  void emit() {
    if (done_) return;
    done_ = true;
    if (skip_) {
      row_.skipped = true;
      row_.pass = true;
      row_.points = 0;
      row_.residual = 0.0;
      c_.rows.push_back(row_);
      return;
    }
    double r = row_.residual;
    bool ok = !bad_ && errs_.empty() && row_.points > 0;
    if (row_.cmp == Compare::AtMost) ok = ok && r <= row_.tol;
    if (row_.cmp == Compare::Above) ok = ok && r > row_.tol;
    if (row_.cmp == Compare::Within) ok = ok && r >= row_.tol && r <= row_.hi;
    row_.pass = ok;
    if (row_.points == 0 && row_.note.empty()) row_.note = "no point evaluated";
    if (!errs_.empty() && row_.note.empty()) row_.note = std::to_string(errs_.size()) + " point(s) raised errors";
    if (row_.points == 0) row_.residual = std::numeric_limits<double>::quiet_NaN();
    c_.rows.push_back(row_);
    for (auto& e : errs_) c_.rows.push_back(e);
  }

  Ctx& c_;
  Row row_;
  std::vector<Row> errs_;
  bool bad_ = false, skip_ = false, done_ = false;
};

// run f over the points; an exception at point i marks every listed check
template <class F>
void each(const std::vector<JetPoint>& pts, std::initializer_list<Check*> checks, F f) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      f(pts[i]);
    } catch (const std::exception& e) {
      for (Check* c : checks) c->error(static_cast<int>(i), e);
    }
  }
}

double rel(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

double mat_rel(const Mat& a, const Mat& b) { return max_abs_diff(a, b) / std::max(1.0, max_abs(b)); }

std::vector<JetPoint> sample(Ctx& c, const std::string& tag, int count, std::vector<Check*> fail_into = {}) {
  CounterRng rng(stream_seed(c.seed, tag));
  try {
    return sample_points(c.s, rng, count);
  } catch (const std::exception& e) {
    for (Check* k : fail_into) k->error(0, e);
    return {};
  }
}

// ---------------------------------------------------------------- metric

void suite_metric(Ctx& c) {
  const Space& s = c.s;
  int n = s.shape.n;
  Check inv(c, "metric.inverse", s.metric.down_closed ? "max |g^ih g_hj - delta| with closed-form g_ij"
                                                      : "max |g^ih g_hj - delta|",
            1e-12);
  Check sym(c, "metric.symmetry", "max |g^ij - g^ji| / max |g|", 1e-14);
  std::vector<JetPoint> pts = sample(c, "metric", c.points, {&inv, &sym});
  each(pts, {&inv, &sym}, [&](const JetPoint& u) {
    MetricPair mp = metric_at(s.metric, u);
    Mat down = s.metric.down_closed ? s.metric.down_closed(u.u) : mp.gDown;
    inv.add(max_abs_diff(matmul(mp.gUp, down), identity(n)));
    sym.add(mat_rel(mp.gUp, transpose(mp.gUp)));
  });
  if (s.g_closed) {
    Check cl(c, "metric.closed_form", "max |g^ij - closed form| / max |g|", 1e-12);
    each(pts, {&cl}, [&](const JetPoint& u) { cl.add(mat_rel(metric_at(s.metric, u).gUp, s.g_closed(u))); });
  }
  if (s.metric.hamiltonian) {
    Check red(c, "metric.reducible", "C^ijh total-symmetry defect (Hamilton spaces are reducible)", 1e-9);
    each(pts, {&red}, [&](const JetPoint& u) {
      ReducibilityProbe p = reducibility_probe(s.metric, u);
      red.add(p.defect / std::max(1.0, p.scale));
    });
  } else {
    Check red(c, "metric.not_reducible", "smallest C^ijh total-symmetry defect; must exceed the tolerance", 1e-9,
              Compare::Above);
    each(pts, {&red}, [&](const JetPoint& u) {
      ReducibilityProbe p = reducibility_probe(s.metric, u);
      red.add(p.defect / std::max(1.0, p.scale));
    });
  }
  if (s.energy) {
    Check en(c, "metric.absolute_energy", "|g^ij p_i p_j - a |p|^2| relative", 1e-12);
    each(pts, {&en}, [&](const JetPoint& u) {
      Mat g = metric_at(s.metric, u).gUp;
      double q = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q += g(i, j) * u.p(i) * u.p(j);
      en.add(rel(q, s.energy(u)));
    });
  }
}

// ---------------------------------------------------------------- connection

void suite_connection(Ctx& c) {
  const Space& s = c.s;
  const BundleShape& sh = s.shape;
  int n = sh.n, k = sh.k;
  NLinearConnection D = canonical_metrical(s.metric, s.N);
  std::vector<std::unique_ptr<Check>> met;
  met.push_back(std::make_unique<Check>(c, "connection.metricity.h", "max |g^ij_|h|", 1e-7));
  for (int a = 1; a < k; ++a)
    met.push_back(std::make_unique<Check>(c, "connection.metricity.v" + std::to_string(a),
                                          "max |g^ij |(" + std::to_string(a) + ")_h|", 1e-7));
  met.push_back(std::make_unique<Check>(c, "connection.metricity.w", "max |g^ij |^h|", 1e-7));
  Check low(c, "connection.metricity.lower", "max |g_ij| covariant derivative| over all directions", 1e-7);
  Check kron(c, "connection.kronecker", "max |covariant derivative of delta|", 1e-14);
  Check tor(c, "connection.torsion_symmetry", "max |H^i_jh - H^i_hj|, |C_i^jh - C_i^hj|", 0.0);
  Check dual(c, "connection.frame_duality", "max |coframe * frame - I|", 1e-12);
  Check mn(c, "connection.dual_primal", "max |N from M - N|", 1e-12);
  std::vector<Check*> all{&low, &kron, &tor, &dual, &mn};
  for (auto& m : met) all.push_back(m.get());
  std::vector<JetPoint> pts = sample(c, "connection", c.points, all);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const JetPoint& u = pts[i];
    try {
      double lw = 0.0, kr = 0.0;
      int slot = 0;
      for (auto dir : {Direction::H, Direction::V, Direction::W})
        for (int a = 1; a < (dir == Direction::V ? k : 2); ++a) {
          met[slot++]->add(covariant_derivative(D, metric_up_field(D.metric), dir, a, u).max_abs());
          lw = std::max(lw, covariant_derivative(D, metric_down_field(D.metric), dir, a, u).max_abs());
          kr = std::max(kr, covariant_derivative(D, kronecker_field(sh), dir, a, u).max_abs());
        }
      low.add(lw);
      kron.add(kr);
      NLinValues v = coefficient_values(D, u);
      double t = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int h = 0; h < n; ++h) {
            t = std::max(t, std::abs(v.H.at({a, b, h}) - v.H.at({a, h, b})));
            t = std::max(t, std::abs(v.Cw.at({a, b, h}) - v.Cw.at({a, h, b})));
          }
      tor.add(t);
      ConnValues cv = connection_values(s.N, u);
      dual.add(max_abs_diff(matmul(coframe_matrix(sh, cv), frame_matrix(sh, cv)), identity(sh.dim())));
      auto Nb = primal_from_dual(cv.M);
      double d = 0.0;
      for (std::size_t a = 0; a < Nb.size(); ++a) d = std::max(d, max_abs_diff(Nb[a], cv.N[a]));
      mn.add(d);
    } catch (const std::exception& e) {
      for (Check* ch : all) ch->error(static_cast<int>(i), e);
    }
  }
  const std::string& kd = s.spec.kind;
  if (s.base && (kd == "electrodynamics" || kd == "riemann_prolong" || kd == "flat")) {
    Check ch(c, "connection.christoffel", "max |H^i_jh - gamma^i_jh|", 1e-9);
    Check cz(c, "connection.c_vanish", "max |C_i^jh|, |C_(a)^i_jh|", 1e-9);
    each(pts, {&ch, &cz}, [&](const JetPoint& u) {
      NLinValues v = coefficient_values(D, u);
      std::vector<double> x(u.u.begin(), u.u.begin() + n);
      std::vector<double> G = christoffel(*s.base, x);
      double a = 0.0, z = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int h = 0; h < n; ++h) {
            a = std::max(a, std::abs(v.H.at({i, j, h}) - G[(i * n + j) * n + h]));
            z = std::max(z, std::abs(v.Cw.at({i, j, h})));
            for (const auto& cv : v.Cv) z = std::max(z, std::abs(cv.at({i, j, h})));
          }
      ch.add(a);
      cz.add(z);
    });
  }
}

// ---------------------------------------------------------------- curvature

void suite_curvature(Ctx& c) {
  const Space& s = c.s;
  NLinearConnection D = canonical_metrical(s.metric, s.N);
  Check ma(c, "curvature.metric_antisymmetry", "max |g^sj W_s^i + g^is W_s^j| over frame pairs", 1e-6);
  Check pa(c, "curvature.pair_antisymmetry", "max |Omega(A,B) + Omega(B,A)|", 0.0);
  std::vector<JetPoint> pts = sample(c, "curvature", std::max(1, c.points / 2), {&ma, &pa});
  bool flat = s.spec.kind == "flat";
  std::unique_ptr<Check> fl;
  if (flat) fl = std::make_unique<Check>(c, "curvature.flat_vanishes", "max |Omega|", 1e-12);
  each(pts, {&ma, &pa}, [&](const JetPoint& u) {
    CurvaturePack cp = curvature(D, u);
    ma.add(cp.metric_antisymmetry_defect());
    pa.add(cp.pair_antisymmetry_defect());
    if (fl) {
      double m = 0.0;
      for (double v : cp.omega) m = std::max(m, std::abs(v));
      fl->add(m);
    }
  });
}

// ---------------------------------------------------------------- dynamics

std::string poly_text(CounterRng& rng, const BundleShape& sh) {
  std::vector<std::string> vars;
  for (int i = 0; i < sh.dim(); ++i) {
    int b = sh.block_of(i), j = i % sh.n + 1;
    if (b == 0)
      vars.push_back("x" + std::to_string(j));
    else if (b == sh.k)
      vars.push_back("p" + std::to_string(j));
    else
      vars.push_back("y" + std::to_string(b) + "_" + std::to_string(j));
  }
  std::ostringstream os;
  os.precision(17);
  os << "0";
  for (int t = 0; t < 6; ++t) {
    os << " + " << rng.uniform();
    int deg = 1 + static_cast<int>(std::abs(rng.uniform()) * 2.999);
    for (int d = 0; d < deg; ++d) os << "*" << vars[static_cast<std::size_t>(std::abs(rng.uniform()) * (vars.size() - 1e-9))];
  }
  return os.str();
}

CurveGerm random_germ(const BundleShape& sh, CounterRng& rng, int len) {
  CurveGerm g;
  g.shape = sh;
  g.x.assign(sh.n, std::vector<double>(len));
  g.p.assign(sh.n, std::vector<double>(len));
  for (auto& v : g.x)
    for (auto& a : v) a = rng.uniform();
  for (auto& v : g.p)
    for (auto& a : v) a = rng.uniform();
  return g;
}

void suite_dynamics(Ctx& c) {
  const Space& s = c.s;
  const BundleShape& sh = s.shape;
  int n = sh.n, k = sh.k;
  int few = std::max(1, c.points / 5);

  // trajectory checks on the space Hamiltonian
  {
    Check dr(c, "dynamics.energy_drift", "max |E(t) - E(0)| on [0, t1] at the configured step", 1e-6);
    Check cs(c, "dynamics.hj_consistency", "max |dx/dt - 1/2 dH/dp|", 1e-9);
    Check ra(c, "dynamics.rk4_ratio", "drift(0.02) / drift(0.01)", 12.0, Compare::Within, 20.0);
    Check tf(c, "dynamics.taylor_oracle", "|RK4 end state - order-12 Taylor flow| (x and p)", 1e-6);
    std::string why;
    if (!s.H)
      why = "no Hamiltonian (generalized metric)";
    else if (!s.hj_capable)
      why = "H depends on y(2..k-1); the Hamilton-Jacobi reduction covers y(1) and p only";
    if (!why.empty()) {
      for (Check* ch : {&dr, &cs, &ra, &tf}) ch->skip(why);
    } else {
      std::vector<double> x0 = c.integ.x0.empty() ? default_x0(n) : c.integ.x0;
      std::vector<double> p0 = c.integ.p0.empty() ? default_p0(n) : c.integ.p0;
      double t1 = c.integ.t1;
      try {
        if (static_cast<int>(x0.size()) != n || static_cast<int>(p0.size()) != n)
          throw ShapeError("x0 and p0 need n entries");
        Trajectory tr = integrate_hj(*s.H, x0, p0, t1, c.integ.step);
        if (tr.failure) throw DomainError("integration failed: " + tr.failure_msg);
        dr.add(tr.drift);
        cs.add(tr.consistency);
        double d1 = integrate_hj(*s.H, x0, p0, t1, 0.02).drift, d2 = integrate_hj(*s.H, x0, p0, t1, 0.01).drift;
        if (d1 < 1e-12) {
          ra.skip("drift at round-off level (" + std::to_string(d1) + "); no order to measure");
        } else {
          ra.add(d1 / d2);
        }
        auto v0 = consistent_velocity(*s.H, x0, p0);
        std::vector<double> s0 = x0;
        s0.insert(s0.end(), v0.begin(), v0.end());
        s0.insert(s0.end(), p0.begin(), p0.end());
        auto ref = taylor_flow(*s.H, s0, t1, 0.05, 12);
        const Sample& last = tr.samples.back();
        double e = 0.0;
        for (int i = 0; i < n; ++i)
          e = std::max({e, std::abs(last.x[i] - ref[i]), std::abs(last.p[i] - ref[2 * n + i])});
        tf.add(e);
      } catch (const std::exception& ex) {
        for (Check* ch : {&dr, &cs, &ra, &tf}) ch->error(0, ex);
      }
    }
  }

  CounterRng rng(stream_seed(c.seed, "dynamics"));
  // Zermelo: H = p . y1 on random curve germs
  {
    Check zf(c, "dynamics.zermelo_flags", "number of failed Zermelo conditions for H = p.y1", 0.0);
    Check ze(c, "dynamics.zermelo_energies", "max |E^a| for H = p.y1", 1e-8);
    std::string src;
    for (int i = 0; i < n; ++i) src += (i ? " + " : "") + std::string("p") + std::to_string(i + 1) + "*y1_" + std::to_string(i + 1);
    ScalarField Z = field_from_text(src, sh);
    for (int r = 0; r < few; ++r) {
      CurveGerm g = random_germ(sh, rng, k + 4);
      try {
        EnergyReport er = invariants_and_energies(Z, g);
        zf.add(static_cast<double>(std::count(er.zermelo.begin(), er.zermelo.end(), false)));
        double m = 0.0;
        for (double e : er.E) m = std::max(m, std::abs(e));
        ze.add(m);
      } catch (const std::exception& e) {
        zf.error(r, e);
        ze.error(r, e);
      }
    }
  }
  // energy of order k-1: invariant form against the Jacobi-Ostrogradski reassembly
  {
    Check ea(c, "dynamics.energy_reassembly", "|E^(k-1) - (sum p_(a).x^(a) - H)|", 1e-9);
    if (!s.H) ea.skip("no Hamiltonian (generalized metric)");
    for (int r = 0; s.H && r < few; ++r) {
      CurveGerm g = random_germ(sh, rng, k + 4);
      for (auto& v : g.x)
        for (auto& a : v) a *= 0.5;
      try {
        EnergyReport er = invariants_and_energies(*s.H, g);
        ea.add(rel(er.E.back(), energy_from_momenta(*s.H, g)));
      } catch (const std::exception& e) {
        ea.error(r, e);
      }
    }
  }
  // Poisson: Jacobi identity for {,}_(k-1), the null-section identity for {,}_0
  {
    Check jac(c, "dynamics.poisson_jacobi", "max |{f,{g,h}} + cyclic| for {,}_(k-1)", 1e-9);
    Check sg(c, "dynamics.sigma0", "max |{f,g}_0 + theta_0(X_f, X_g)| on the null section", 1e-12);
    for (int r = 0; r < few; ++r) {
      ScalarField f = (s.H && r % 2 == 0) ? *s.H : field_from_text(poly_text(rng, sh), sh);
      ScalarField g = field_from_text(poly_text(rng, sh), sh);
      ScalarField h = field_from_text(poly_text(rng, sh), sh);
      JetPoint u = random_point(sh, rng);
      try {
        int a = k - 1;
        double j = poisson_bracket(f, poisson_field(g, h, a), a, u) + poisson_bracket(g, poisson_field(h, f, a), a, u) +
                   poisson_bracket(h, poisson_field(f, g, a), a, u);
        jac.add(std::abs(j));
      } catch (const std::exception& e) {
        jac.error(r, e);
      }
      for (int b = 1; b < k; ++b)
        for (int i = 0; i < n; ++i) u.u[sh.y(b, i)] = 0.0;
      // a Hamiltonian singular on the null section (K^2 of a Cartan space) is replaced by the polynomial
      try {
        (void)gradient(f, u);
      } catch (const DomainError&) {
        f = field_from_text(poly_text(rng, sh), sh);
      }
      try {
        double br = poisson_bracket(f, g, 0, u);
        sg.add(std::abs(br + theta0(sigma0_field(f, u), sigma0_field(g, u), n)));
      } catch (const std::exception& e) {
        sg.error(r, e);
      }
    }
  }
}

// ---------------------------------------------------------------- legendre

std::vector<JetPoint> tangent_points(Ctx& c, const LagrangeSpace& L, int count) {
  CounterRng rng(stream_seed(c.seed, "legendre-tangent"));
  std::vector<JetPoint> pts;
  for (int t = 0; t < 100 * count && static_cast<int>(pts.size()) < count; ++t) {
    JetPoint v = random_point(L.shape, rng);
    if (!v.off_null()) continue;
    try {
      lagrange_tensor(L, v);
    } catch (const DegeneracyError&) {
      continue;
    }
    pts.push_back(v);
  }
  return pts;
}

void suite_legendre(Ctx& c) {
  const Space& s = c.s;
  const BundleShape& sh = s.shape;
  int n = sh.n;
  Check xp(c, "legendre.xi_phi", "max |xi(phi(v)) - y(k)|", 1e-8);
  Check px(c, "legendre.phi_xi", "max |phi(u with y(k) = xi(u)) - u|", 1e-8);
  Check ddh(c, "legendre.dual_of_dual_H", "max |H** - H| relative", 1e-8);
  Check ddl(c, "legendre.dual_of_dual_L", "max |L** - L| relative", 1e-8);
  Check cf(c, "legendre.closed_form_H", "max |dual of closed-form L - H| relative", 1e-9);
  Check ai(c, "legendre.anchor_independence", "max |g^ij(anchor A) - g^ij(anchor B)| over three anchors", 1e-9);
  Check gi(c, "legendre.metric_inverse", "max |g^ij(u) a_jh(xi(u)) - delta|", 1e-8);
  std::vector<Check*> all{&xp, &px, &ddh, &ddl, &cf, &ai, &gi};
  if (!s.H) {
    for (Check* ch : all) ch->skip("no Hamiltonian (generalized metric)");
    return;
  }
  const Anchor& A = s.anchor;
  bool closed = static_cast<bool>(s.lagrangian);
  LagrangeSpace L;
  try {
    L = closed ? s.lagrangian(A) : dual_lagrangian(*s.H, A);
  } catch (const std::exception& e) {
    for (Check* ch : all) ch->error(0, e);
    return;
  }
  if (!closed) {
    const char* why = "needs a Lagrangian evaluable two Taylor levels deep (closed-form kinds only)";
    ddl.skip(why);
    cf.skip("no closed-form Lagrangian for this kind");
    ai.skip(why);
  }
  ScalarField Hs = *s.H;
  // phi o xi on the cotangent side, xi o phi on the tangent side
  std::vector<JetPoint> cot = sample(c, "legendre", c.points, all);
  std::vector<JetPoint> tan = tangent_points(c, L, c.points);
  ScalarField Hd = dual_hamiltonian(L, A);
  LagrangeSpace Ld = dual_lagrangian(Hs, A);
  ScalarField Hdd = dual_hamiltonian(Ld, A);
  ScalarField Hz, Hc;
  if (closed) {
    Hz = dual_hamiltonian(L, zero_anchor(sh));
    std::vector<Mat> M;
    for (int a = 1; a < sh.k; ++a) {
      Mat m(n, n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = 0.1 * (i + 1) - 0.07 * a * (j + 1) + (i == j ? 0.2 : 0.0);
      M.push_back(m);
    }
    Hc = dual_hamiltonian(L, constant_anchor(sh, M));
  }
  each(tan, {&xp}, [&](const JetPoint& v) {
    JetPoint u = legendre_forward(L, v);
    std::vector<double> xi = legendre_inverse(L, u);
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(xi[i] - v.u[sh.p(i)]));
    xp.add(e);
  });
  if (closed) {
    ScalarField Hcl = Hd;
    each(tan, {&ddl}, [&](const JetPoint& v) {
      LagrangeSpace Lb = dual_lagrangian(Hcl, A);
      ddl.add(rel(Lb.L(v), L.L(v)));
    });
  }
  each(cot, {&px, &ddh, &gi}, [&](const JetPoint& u) {
    std::vector<double> xi = legendre_inverse(L, u);
    JetPoint v = u;
    for (int i = 0; i < n; ++i) v.u[sh.p(i)] = xi[i];
    JetPoint back = legendre_forward(L, v);
    double e = 0.0;
    for (int i = 0; i < sh.dim(); ++i) e = std::max(e, std::abs(back.u[i] - u.u[i]));
    px.add(e);
    ddh.add(rel(Hdd(u), Hs(u)));
    Mat a = lagrange_tensor(L, v);
    gi.add(max_abs_diff(matmul(metric_at(s.metric, u).gUp, a), identity(n)));
  });
  if (closed) {
    each(cot, {&cf, &ai}, [&](const JetPoint& u) {
      cf.add(rel(Hd(u), Hs(u)));
      Mat g1 = fundamental_tensor(Hd, u).gUp, g2 = fundamental_tensor(Hz, u).gUp, g3 = fundamental_tensor(Hc, u).gUp;
      ai.add(std::max(max_abs_diff(g1, g2), max_abs_diff(g1, g3)));
    });
  }
}

// ---------------------------------------------------------------- structures

void suite_structures(Ctx& c) {
  const Space& s = c.s;
  const BundleShape& sh = s.shape;
  int n = sh.n;
  Check ct(c, "structures.contact", "max |F^3 + F|", 1e-10);
  Check rk(c, "structures.rank_F", "max |rank F - 2n|", 0.0);
  Check sk(c, "structures.skew", "max |G(FX,Y) + G(X,FY)|", 1e-10);
  Check tp(c, "structures.theta_adapted", "max |theta - delta p ^ dx| in the adapted frame", 1e-12);
  Check kr(c, "structures.kernel", "max |F| on and into the V blocks", 0.0);
  Check cb(c, "structures.metric_free_contact", "max |Fbb^3 + Fbb|", 0.0);
  Check rb(c, "structures.rank_Fbb", "max |rank Fbb - 2n|", 0.0);
  Check tn(c, "structures.theta_natural", "max |theta - dp ^ dx - (N_ba - N_ab) dx^a ^ dx^b| in natural coordinates", 1e-12);
  Check tc(c, "structures.theta_dp_dx", "max |theta - dp ^ dx| in natural coordinates (symmetric N_ij)", 1e-12);
  std::vector<Check*> all{&ct, &rk, &sk, &tp, &kr, &cb, &rb, &tn, &tc};
  std::vector<JetPoint> pts = sample(c, "structures", c.points, all);
  double asym = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      const JetPoint& u = pts[i];
      LiftedStructures ls = lifted_structures(s.metric, s.N, u);
      ConnValues cv = connection_values(s.N, u);
      StructureChecks r = check_structures(ls, cv);
      ct.add(r.contact);
      rk.add(std::abs(r.rank_F - 2 * n));
      sk.add(r.skew);
      tp.add(r.theta_pattern);
      kr.add(r.kernel);
      cb.add(r.contact_free);
      rb.add(std::abs(r.rank_Fbb - 2 * n));
      Mat want = canonical_two_form(sh);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) want(a, b) = cv.Nlow(b, a) - cv.Nlow(a, b);
      tn.add(max_abs_diff(to_natural(ls.theta, ls.coframe), want));
      asym = std::max(asym, r.nlow_asym);
      if (r.nlow_asym <= 1e-12) tc.add(r.theta_canonical);
    } catch (const std::exception& e) {
      for (Check* ch : all) ch->error(static_cast<int>(i), e);
    }
  }
  if (asym > 1e-12) tc.skip("N_ij is not symmetric here; see structures.theta_natural");
}

// ---------------------------------------------------------------- homogeneity

void suite_homogeneity(Ctx& c) {
  const Space& s = c.s;
  const BundleShape& sh = s.shape;
  int k = sh.k;
  std::vector<JetPoint> pts = sample(c, "homogeneity", c.points);
  if (s.K) {
    const ScalarField& K = *s.K;
    Check eu(c, "homogeneity.euler_K", "max |sum a y(a).dK/dy(a) + k p.dK/dp - k K|", 1e-9);
    Check sc(c, "homogeneity.scaling_K", "max |K(a.u) - a^k K(u)| / |a^k K(u)|, a in {0.5, 2, 3}", 1e-7);
    Check z0(c, "homogeneity.a_zero_homogeneous", "max |a^ij(a.u) - a^ij(u)| relative, a in {0.5, 2, 3}", 1e-12);
    each(pts, {&eu, &sc, &z0}, [&](const JetPoint& u) {
      double k0 = K(u);
      eu.add(std::abs(euler_operator(K, u) - k * k0));
      double w = 0.0, z = 0.0;
      for (double a : {0.5, 2.0, 3.0}) {
        JetPoint v = scale_fibers(u, a);
        double want = std::pow(a, k) * k0;
        w = std::max(w, std::abs(K(v) - want) / std::abs(want));
        z = std::max(z, mat_rel(s.g_closed(v), s.g_closed(u)));
      }
      sc.add(w);
      z0.add(z);
    });
  }
  if (!s.H) {
    Check h(c, "homogeneity.degree_H", "", 0.0);
    h.skip("no Hamiltonian (generalized metric)");
    return;
  }
  const ScalarField& H = *s.H;
  Check eu(c, "homogeneity.euler_fd", "|Euler operator on H - d/da H(a.u) at a = 1 by central differences| relative", 1e-7);
  each(pts, {&eu}, [&](const JetPoint& u) {
    double h = 1e-4;
    double fd = (H(scale_fibers(u, 1 + h)) - H(scale_fibers(u, 1 - h))) / (2 * h);
    // the central difference carries an O(h^2) term: bound it by a second stencil
    double fd2 = (H(scale_fibers(u, 1 + 2 * h)) - H(scale_fibers(u, 1 - 2 * h))) / (4 * h);
    double rich = (4 * fd - fd2) / 3;
    eu.add(rel(euler_operator(H, u), rich));
  });
  const std::string& kd = s.spec.kind;
  bool charged = kd == "electrodynamics" && s.spec.e != 0.0 &&
                 !std::all_of(s.spec.b.begin(), s.spec.b.end(), [](const std::string& b) { return b == "0"; });
  if (kd == "custom_expr") {
    Check h(c, "homogeneity.degree_H", "", 0.0);
    int hom = 0;
    for (const auto& u : pts) {
      try {
        if (homogeneity_degree(H, u).homogeneous) ++hom;
      } catch (const std::exception&) {
      }
    }
    h.skip("no expected degree for a custom Hamiltonian; homogeneous at " + std::to_string(hom) + " of " +
           std::to_string(pts.size()) + " points");
  } else if (charged) {
    Check h(c, "homogeneity.H_inhomogeneous", "smallest scaling defect of H (charged: must exceed the tolerance)", 1e-7,
            Compare::Above);
    each(pts, {&h}, [&](const JetPoint& u) { h.add(homogeneity_degree(H, u).worst_rel); });
  } else {
    Check h(c, "homogeneity.degree_H", "max(|r - 2k|, scaling defect) of H", 1e-7);
    each(pts, {&h}, [&](const JetPoint& u) {
      HomogeneityVerdict v = homogeneity_degree(H, u);
      h.add(std::max(std::abs(v.r - 2 * k), v.worst_rel));
    });
  }
}

// ---------------------------------------------------------------- covariance

// Jacobian of a generic map at x, at scalar level S
template <class S, class F>
SMat<S> jac_of(F f, const std::vector<S>& x) {
  int n = static_cast<int>(x.size());
  const TaylorSpace* sp = TaylorSpace::get(n, 1);
  std::vector<TaylorT<S>> X;
  for (int i = 0; i < n; ++i) X.push_back(TaylorT<S>::variable(sp, i, x[i]));
  auto Y = f(X);
  SMat<S> J(n, n, zero_like(x[0]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J(i, j) = Y[i].coef(sp->var_index(j));
  return J;
}

// gamma~(x~) = (dx/dx~)^T gamma(x) (dx/dx~)
BaseMetric transformed_base(const BaseMetric& g, const QuadraticMap& q) {
  auto f = [g, q](const auto& xt) {
    auto x = q.inverse(xt);
    auto Ji = jac_of([&q](const auto& y) { return q.inverse(y); }, xt);
    return matmul(transpose(Ji), matmul(g(x), Ji));
  };
  BaseMetric b;
  b.n = g.n;
  b.name = g.name + " (transformed)";
  b.g = make_tri<MatSig>(f);
  b.g3 = [](const std::vector<Taylor3>&) -> SMat<Taylor3> {
    throw std::logic_error("transformed base metric is not available three Taylor levels deep");
  };
  return b;
}

void suite_covariance(Ctx& c) {
  const Space& s = c.s;
  const BundleShape& sh = s.shape;
  int n = sh.n, k = sh.k;
  QuadraticMap q = random_quadratic_map(n, stream_seed(c.seed, "covariance-map"));
  Diffeomorphism phi = to_diffeo(q);
  Check gc(c, "covariance.metric", "max |g~(u~) - J g(u) J^T| relative, recomputed in the new chart", 1e-8);
  Check zc(c, "covariance.liouville", "max |z~(a)(u~) - J z(a)(u)|, prolongation recomputed in the new chart", 1e-8);
  std::vector<JetPoint> pts = sample(c, "covariance", std::max(1, c.points / 5), {&gc, &zc});
  ScalarField Ht;
  if (s.H) {
    ScalarField H = *s.H;
    Tri<VecSig> back = phi.inverse;
    // double and Taylor levels only: transform_point climbs one level itself
    Ht.shape = sh;
    Ht.name = H.name + " (transformed)";
    Ht.f.d = [H, back, sh](const std::vector<double>& ut) { return H(transform_point(sh, ut, back)); };
    Ht.f.t = [H, back, sh](const std::vector<Taylor>& ut) { return H(transform_point(sh, ut, back)); };
  }
  std::optional<BaseMetric> bt;
  if (s.base) bt = transformed_base(*s.base, q);
  if (!s.base) zc.skip("connection is not a prolongation of a base metric");
  if (!s.H && !s.optics_up) gc.skip("no recomputation available for this metric");
  each(pts, {&gc, &zc}, [&](const JetPoint& u) {
    JetPoint ut = transform_point(u, phi);
    Mat g = metric_at(s.metric, u).gUp;
    Mat want = to_matrix(transform_dtensor(from_matrix(g, {Variance::Up, k}, {Variance::Up, k}), phi, u));
    if (s.H)
      gc.add(mat_rel(fundamental_tensor(Ht, ut).gUp, want));
    else if (s.optics_up)
      gc.add(mat_rel(s.optics_up(*bt, ut.u, u.u), want));
    if (bt) {
      auto z = liouville_d_vectors(s.N, u);
      auto zt = liouville_d_vectors(prolong_riemann(*bt, sh), ut);
      double e = 0.0;
      for (int a = 0; a + 1 < k; ++a) {
        DTensor d(n, {{Variance::Up, 0}});
        d.comp = z[a];
        DTensor dt = transform_dtensor(d, phi, u);
        for (int i = 0; i < n; ++i) e = std::max(e, std::abs(dt.comp[i] - zt[a][i]));
      }
      zc.add(e);
    }
  });
}

}  // namespace

int Report::failed() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.pass; }));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"metric",     "connection",  "curvature",  "dynamics", "legendre",
                                          "structures", "homogeneity", "covariance", "all"};
  return s;
}

std::vector<JetPoint> sample_points(const Space& s, CounterRng& rng, int count) {
  std::vector<JetPoint> pts;
  for (int t = 0; t < 100 * count && static_cast<int>(pts.size()) < count; ++t) {
    JetPoint u = random_point(s.shape, rng);
    if (!u.off_null()) continue;
    try {
      metric_at(s.metric, u);
    } catch (const DegeneracyError&) {
      continue;
    }
    pts.push_back(u);
  }
  return pts;
}

Report run_suite(const Space& s, const std::string& suite, std::uint64_t seed, int points, const IntegrateSpec& integ) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) throw SpecError("suite", "unknown suite '" + suite + "'");
  Report r;
  r.space = s.spec.kind;
  r.title = s.title;
  r.suite = suite;
  r.n = s.shape.n;
  r.k = s.shape.k;
  r.seed = seed;
  r.points = points;
  Ctx c{s, seed, points, integ, r.rows};
  using Fn = void (*)(Ctx&);
  const std::pair<const char*, Fn> table[] = {
      {"metric", suite_metric},         {"connection", suite_connection}, {"curvature", suite_curvature},
      {"dynamics", suite_dynamics},     {"legendre", suite_legendre},     {"structures", suite_structures},
      {"homogeneity", suite_homogeneity}, {"covariance", suite_covariance}};
  for (const auto& [name, fn] : table) {
    if (suite != "all" && suite != name) continue;
    try {
      fn(c);
    } catch (const std::exception& e) {
      Row row;
      row.check = std::string(name) + ".setup";
      row.property = "suite setup";
      row.residual = std::numeric_limits<double>::quiet_NaN();
      row.seed = seed;
      row.note = e.what();
      r.rows.push_back(row);
    }
  }
  std::stable_sort(r.rows.begin(), r.rows.end(), [](const Row& a, const Row& b) {
    return a.check != b.check ? a.check < b.check : a.point < b.point;
  });
  return r;
}

namespace {

json row_json(const Row& r) {
  json j;
  j["check"] = r.check;
  j["property"] = r.property;
  j["point"] = r.point;
  j["max_residual"] = std::isfinite(r.residual) ? json(r.residual) : json(nullptr);
  if (r.cmp == Compare::Within)
    j["tolerance"] = json::array({r.tol, r.hi});
  else
    j["tolerance"] = r.tol;
  j["comparison"] = r.cmp == Compare::AtMost ? "<=" : r.cmp == Compare::Above ? ">" : "in";
  j["status"] = r.skipped ? "skip" : r.pass ? "pass" : "fail";
  j["points"] = r.points;
  j["seed"] = r.seed;
  j["note"] = r.note;
  return j;
}

json report_obj(const Report& r) {
  json j;
  j["schema"] = kReportSchema;
  j["space"] = r.space;
  j["title"] = r.title;
  j["n"] = r.n;
  j["k"] = r.k;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["points"] = r.points;
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  j["rows"] = rows;
  j["failed"] = r.failed();
  j["pass"] = r.failed() == 0;
  return j;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string report_json(const Report& r) { return report_obj(r).dump(2) + "\n"; }

std::string report_table(const Report& r) {
  std::ostringstream os;
  os << r.space << " (n = " << r.n << ", k = " << r.k << "), suite " << r.suite << ", seed " << r.seed << "\n";
  std::size_t w = 5;
  for (const auto& row : r.rows) w = std::max(w, row.check.size() + (row.point >= 0 ? 6 : 0));
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-11s  %-17s  %-6s  %5s\n", static_cast<int>(w), "check", "residual",
                "tolerance", "status", "pts");
  os << line;
  for (const auto& row : r.rows) {
    std::string name = row.check + (row.point >= 0 ? " #" + std::to_string(row.point) : "");
    std::string res = std::isfinite(row.residual) ? fmt("%.3e", row.residual) : "-";
    std::string tol = row.cmp == Compare::Within ? "in [" + fmt("%g", row.tol) + ", " + fmt("%g", row.hi) + "]"
                      : row.cmp == Compare::Above ? "> " + fmt("%.0e", row.tol)
                                                  : "<= " + fmt("%.0e", row.tol);
    if (row.skipped) res = "-";
    const char* st = row.skipped ? "skip" : row.pass ? "pass" : "FAIL";
    std::snprintf(line, sizeof line, "%-*s  %-11s  %-17s  %-6s  %5d", static_cast<int>(w), name.c_str(), res.c_str(),
                  tol.c_str(), st, row.points);
    os << line;
    if (!row.note.empty()) os << "  " << row.note;
    os << "\n";
  }
  os << r.rows.size() << " rows, " << r.failed() << " failed\n";
  return os.str();
}

std::string merge_reports(const std::vector<std::string>& docs, int& failed) {
  json out;
  out["schema"] = kReportSetSchema;
  json arr = json::array();
  failed = 0;
  int rows = 0;
  for (const auto& d : docs) {
    json j = json::parse(d);
    if (!j.contains("schema") || j["schema"] != kReportSchema)
      throw std::runtime_error("not a report document (schema " + std::string(kReportSchema) + " expected)");
    for (const auto& row : j["rows"]) {
      ++rows;
      if (row["status"] == "fail") ++failed;
    }
    arr.push_back(j);
  }
  out["reports"] = arr;
  out["rows"] = rows;
  out["failed"] = failed;
  out["pass"] = failed == 0;
  return out.dump(2) + "\n";
}

}  // namespace hk
