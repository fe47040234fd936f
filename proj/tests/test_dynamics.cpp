#include <doctest.h>

#include <cmath>

#include "hk/dynamics.hpp"

using namespace hk;

namespace {

CurveGerm random_germ(const BundleShape& sh, CounterRng& rng, int len) {
  CurveGerm c;
  c.shape = sh;
  c.x.assign(sh.n, std::vector<double>(len));
  c.p.assign(sh.n, std::vector<double>(len));
  for (auto& v : c.x)
    for (auto& a : v) a = rng.uniform();
  for (auto& v : c.p)
    for (auto& a : v) a = rng.uniform();
  return c;
}

std::string random_poly(CounterRng& rng, const BundleShape& sh) {
  // a few random monomials of degree <= 3 in x1, y1_1, y2_2, p1, p2
  const char* vars[] = {"x1", "x2", "y1_1", "y2_2", "p1", "p2"};
  std::string s = "0";
  for (int t = 0; t < 6; ++t) {
    s += " + " + std::to_string(rng.uniform());
    int deg = 1 + static_cast<int>(std::abs(rng.uniform()) * 3);
    for (int d = 0; d < deg; ++d) s += std::string("*") + vars[static_cast<int>(std::abs(rng.uniform()) * 5.999)];
  }
  (void)sh;
  return s;
}

}  // namespace

TEST_CASE("Poisson brackets: canonical pairs, antisymmetry, Leibniz, Jacobi") {
  BundleShape sh(2, 3);
  CounterRng rng(101);
  JetPoint u = random_point(sh, rng);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      auto xi = field_from_text("x" + std::to_string(i + 1), sh);
      auto pj = field_from_text("p" + std::to_string(j + 1), sh);
      CHECK(poisson_bracket(xi, pj, 0, u) == (i == j ? 1.0 : 0.0));
    }
  for (int rep = 0; rep < 10; ++rep) {
    auto f = field_from_text(random_poly(rng, sh), sh);
    auto g = field_from_text(random_poly(rng, sh), sh);
    auto h = field_from_text(random_poly(rng, sh), sh);
    auto gh = make_field(sh, "gh", [g, h](const auto& v) { return g(v) * h(v); });
    JetPoint v = random_point(sh, rng);
    for (int a = 0; a < sh.k; ++a) {
      CHECK(std::abs(poisson_bracket(f, g, a, v) + poisson_bracket(g, f, a, v)) < 1e-12);
      double leib = poisson_bracket(f, g, a, v) * h(v) + poisson_bracket(f, h, a, v) * g(v);
      CHECK(std::abs(poisson_bracket(f, gh, a, v) - leib) < 1e-12);
    }
    int a = sh.k - 1;
    double jac = poisson_bracket(f, poisson_field(g, h, a), a, v) + poisson_bracket(g, poisson_field(h, f, a), a, v) +
                 poisson_bracket(h, poisson_field(f, g, a), a, v);
    CHECK(std::abs(jac) < 1e-9);
  }
}

TEST_CASE("bracket on the null section against theta_0 of Hamiltonian fields") {
  BundleShape sh(2, 3);
  CounterRng rng(102);
  for (int rep = 0; rep < 20; ++rep) {
    auto f = field_from_text(random_poly(rng, sh) + " + sin(x2*p1)", sh);
    auto g = field_from_text(random_poly(rng, sh) + " + exp(x1)*p2^2", sh);
    JetPoint u = random_point(sh, rng);
    for (int a = 1; a < sh.k; ++a)
      for (int i = 0; i < 2; ++i) u.u[sh.y(a, i)] = 0.0;
    double br = poisson_bracket(f, g, 0, u);
    double th = theta0(sigma0_field(f, u), sigma0_field(g, u), 2);
    CHECK(std::abs(br + th) < 1e-12);
  }
}

TEST_CASE("invariants and energies") {
  BundleShape sh(2, 3);
  CounterRng rng(103);
  // y-free Hamiltonian: invariants vanish, E^{k-1} = -H
  auto H0 = field_from_text("p1^2 + x1*p2^2", sh);
  CurveGerm c = random_germ(sh, rng, 6);
  EnergyReport r0 = invariants_and_energies(H0, c);
  for (double v : r0.I) CHECK(v == 0.0);
  CHECK(r0.E.back() == doctest::Approx(-H0(c.point())).epsilon(1e-14));

  for (int k : {2, 3, 4}) {
    BundleShape s(2, k);
    auto Z = field_from_text("p1*y1_1 + p2*y1_2", s);
    CurveGerm g = random_germ(s, rng, k + 4);
    EnergyReport r = invariants_and_energies(Z, g);
    CHECK(r.zermelo_all());
    for (double e : r.E) CHECK(std::abs(e) < 1e-8);
  }
}

TEST_CASE("Jacobi-Ostrogradski momenta and the energy reassembly") {
  BundleShape sh(2, 3);
  CounterRng rng(104);
  auto Z = field_from_text("p1*y1_1 + p2*y1_2", sh);
  CurveGerm c = random_germ(sh, rng, 6);
  auto P = jacobi_ostrogradski(Z, c);
  CHECK(P[0][0] == doctest::Approx(c.p[0][0]));
  CHECK(P[0][1] == doctest::Approx(c.p[1][0]));
  CHECK(P[1][0] == 0.0);
  CHECK(P[1][1] == 0.0);

  for (int k : {2, 3, 4}) {
    BundleShape s(2, k);
    std::string src = "p1^2 + p2^2 + 0.3*p1*y1_1*x2 + 0.2*sin(y1_2)*p2";
    if (k > 2) src += " + 0.1*y2_1*p2*x1 + 0.05*y2_2^2*p1";
    if (k > 3) src += " + 0.2*y3_1*y1_2*p1";
    auto H = field_from_text(src, s);
    for (int rep = 0; rep < 5; ++rep) {
      CurveGerm g = random_germ(s, rng, k + 4);
      EnergyReport r = invariants_and_energies(H, g);
      CHECK(std::abs(r.E.back() - energy_from_momenta(H, g)) < 1e-9);
    }
  }
}

TEST_CASE("free particle and constant-coefficient electrodynamics") {
  BundleShape sh(2, 3);
  auto H = field_from_text("p1^2 + p2^2", sh);
  Trajectory tr = integrate_hj(H, {0.2, -0.4}, {0.7, 0.3}, 1.0, 1e-2);
  REQUIRE_FALSE(tr.failure);
  for (const auto& s : tr.samples) {
    CHECK(std::abs(s.x[0] - (0.2 + s.t * 0.7)) < 1e-12);
    CHECK(std::abs(s.x[1] - (-0.4 + s.t * 0.3)) < 1e-12);
    CHECK(std::abs(s.p[1] - 0.3) < 1e-12);
  }
  // m = 2, c = 1.5: dx/dt = p / (m c)
  auto E = field_from_text("(p1^2 + p2^2)/3", sh);
  Trajectory te = integrate_hj(E, {0, 0}, {0.6, -0.9}, 1.0, 0.1);
  CHECK(std::abs(te.samples.back().x[0] - 0.2) < 1e-12);
  CHECK(std::abs(te.samples.back().x[1] + 0.3) < 1e-12);

  auto Y2 = field_from_text("p1^2 + p2^2 + y2_1*p1", sh);
  CHECK_THROWS_AS(integrate_hj(Y2, {0, 0}, {1, 1}, 1.0, 0.1), NotSupported);
}

TEST_CASE("coupled toy: energy drift, RK4 order, Taylor-stepper agreement") {
  BundleShape sh(2, 3);
  auto H = field_from_text("p1^2 + p2^2 + 0.5*(p1*y1_1 + p2*y1_2) + 0.1*(y1_1^2 + y1_2^2) + 0.5*(x1^2 + x2^2) + 0.1*x1^2*x2^2", sh);
  std::vector<double> x0{0.3, -0.2}, p0{0.4, 0.5};
  Trajectory tr = integrate_hj(H, x0, p0, 1.0, 1e-3);
  REQUIRE_FALSE(tr.failure);
  CHECK(tr.drift < 1e-6);
  CHECK(tr.consistency < 1e-9);

  double d1 = integrate_hj(H, x0, p0, 1.0, 0.02).drift;
  double d2 = integrate_hj(H, x0, p0, 1.0, 0.01).drift;
  double ratio = d1 / d2;
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);

  auto v0 = consistent_velocity(H, x0, p0);
  std::vector<double> s0{x0[0], x0[1], v0[0], v0[1], p0[0], p0[1]};
  auto ref = taylor_flow(H, s0, 1.0, 0.05, 12);
  const Sample& last = tr.samples.back();
  CHECK(std::abs(last.x[0] - ref[0]) < 1e-6);
  CHECK(std::abs(last.x[1] - ref[1]) < 1e-6);
  CHECK(std::abs(last.p[0] - ref[4]) < 1e-6);
  CHECK(std::abs(last.p[1] - ref[5]) < 1e-6);
}

TEST_CASE("paths of an N-linear connection") {
  BundleShape sh(2, 3);
  // conformal metric exp(2 x1) delta: H = exp(-2 x1)|p|^2, prolonged connection
  auto H = field_from_text("exp(-2*x1)*(p1^2 + p2^2)", sh);
  auto gam = make_base_metric(2, "conformal", [](const auto& x) {
    using S = std::decay_t<decltype(x[0])>;
    using std::exp;
    SMat<S> g(2, 2, zero_like(x[0]));
    g(0, 0) = g(1, 1) = exp(x[0] * 2.0);
    return g;
  });
  auto D = canonical_metrical(hamilton_metric(H), prolong_riemann(gam, sh));

  // standalone geodesic integrator with the closed-form symbols
  OdeRhs geo = [](const std::vector<double>& s) {
    double v1 = s[2], v2 = s[3];
    // Gamma^1_11 = 1, Gamma^1_22 = -1, Gamma^2_12 = Gamma^2_21 = 1
    return std::vector<double>{v1, v2, -(v1 * v1 - v2 * v2), -(2 * v1 * v2)};
  };
  std::vector<double> g0{0.1, 0.2, 0.5, -0.3};
  auto gend = rk4_flow(geo, g0, 1.0, 1e-3);

  std::vector<double> h0{0.1, 0.2, 0.5, -0.3, 0.3, -0.1, 0.2, 0.4, 0.6, 0.7};
  OdeRhs hor = [&D](const std::vector<double>& s) { return horizontal_rhs(D, s); };
  auto hend = rk4_flow(hor, h0, 1.0, 1e-3);
  CHECK(std::abs(hend[0] - gend[0]) < 1e-7);
  CHECK(std::abs(hend[1] - gend[1]) < 1e-7);

  // the full autoparallel system with horizontal initial velocity stays horizontal
  JetPoint u0(sh, {0.1, 0.2, 0.3, -0.1, 0.2, 0.4, 0.6, 0.7});
  std::vector<double> st(u0.u);
  auto rh = horizontal_rhs(D, h0);
  std::vector<double> ud{0.5, -0.3};
  ud.insert(ud.end(), rh.begin() + 4, rh.end());
  st.insert(st.end(), ud.begin(), ud.end());
  OdeRhs ap = [&D](const std::vector<double>& s) { return autoparallel_rhs(D, s); };
  auto aend = rk4_flow(ap, st, 0.5, 1e-3);
  auto hmid = rk4_flow(hor, h0, 0.5, 1e-3);
  CHECK(std::abs(aend[0] - hmid[0]) < 1e-8);
  CHECK(std::abs(aend[1] - hmid[1]) < 1e-8);
  for (int q = 0; q < 6; ++q) CHECK(std::abs(aend[2 + q] - hmid[4 + q]) < 1e-8);

  // w-path with C = 0: p affine in t
  std::vector<double> w0(u0.u);
  w0[2] = w0[3] = w0[4] = w0[5] = 0.0;
  w0.push_back(0.3);
  w0.push_back(-0.2);
  OdeRhs wp = [&D](const std::vector<double>& s) { return wpath_rhs(D, s); };
  auto wend = rk4_flow(wp, w0, 1.0, 0.1);
  CHECK(std::abs(wend[sh.p(0)] - (0.6 + 0.3)) < 1e-12);
  CHECK(std::abs(wend[sh.p(1)] - (0.7 - 0.2)) < 1e-12);

  // flat: straight lines in every slot
  BundleShape s2(1, 2);
  auto F = canonical_metrical(hamilton_metric(field_from_text("p1^2", s2)), zero_connection(s2));
  OdeRhs fa = [&F](const std::vector<double>& s) { return autoparallel_rhs(F, s); };
  auto fend = rk4_flow(fa, {0.1, 0.2, 0.3, 1.0, -1.0, 0.5}, 1.0, 0.1);
  CHECK(std::abs(fend[0] - 1.1) < 1e-12);
  CHECK(std::abs(fend[1] + 0.8) < 1e-12);
  CHECK(std::abs(fend[2] - 0.8) < 1e-12);
  OdeRhs fv = [&F](const std::vector<double>& s) { return vertical_rhs(F, 1, s); };
  auto vend = rk4_flow(fv, {0.1, 0.2, 0.3, 2.0}, 1.0, 0.1);
  CHECK(std::abs(vend[1] - 2.2) < 1e-12);
}
