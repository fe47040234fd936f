#include <doctest.h>

#include <cmath>

#include "hk/legendre.hpp"

using namespace hk;

namespace {

// gamma = [[2 + sin x2, 0.3 x1], [0.3 x1, 1 + x1^2]], b = (0.5 x2, -0.3 x1^2)
template <class S>
SMat<S> gam(const std::vector<S>& x) {
  using std::sin;
  SMat<S> g(2, 2, zero_like(x[0]));
  g(0, 0) = sin(x[1]) + 2.0;
  g(0, 1) = g(1, 0) = x[0] * 0.3;
  g(1, 1) = x[0] * x[0] + 1.0;
  return g;
}
template <class S>
std::vector<S> bvec(const std::vector<S>& x) {
  return {x[1] * 0.5, x[0] * x[0] * -0.3};
}

BaseMetric base() {
  return make_base_metric(2, "gamma", [](const auto& x) { return gam(x); });
}

constexpr double kM = 2.0, kC = 1.5, kE = 0.7;

LagrangeSpace electro(const BundleShape& sh, const Anchor& A) {
  auto f = [sh, A](const auto& v) {
    using S = std::decay_t<decltype(v[0])>;
    std::vector<S> x(v.begin(), v.begin() + 2);
    auto g = gam(x);
    auto b = bvec(x);
    auto shift = anchor_shift(A, v);
    std::vector<S> z{v[sh.p(0)] + shift[0], v[sh.p(1)] + shift[1]};
    S s = zero_like(v[0]);
    for (int i = 0; i < 2; ++i) {
      s = s + b[i] * z[i] * (2 * kE / kM);
      for (int j = 0; j < 2; ++j) s = s + g(i, j) * z[i] * z[j] * (kM * kC);
    }
    return s;
  };
  return LagrangeSpace{sh, make_field(sh, "electrodynamics", f)};
}

LagrangeSpace quartic(const BundleShape& sh) {
  return LagrangeSpace{sh, field_from_text("y3_1^2 + 2*y3_2^2 + 0.1*(y3_1^2 + y3_2^2)^2 + 0.3*x1*y3_1*y1_2 + "
                                           "0.2*y3_2*y2_1^2 + 0.5*y3_1*y3_2*cos(x2) + sin(x1)*y1_1^2",
                                           sh, Side::Tangent)};
}

JetPoint tangent_point(const BundleShape& sh, CounterRng& rng) { return random_point(sh, rng, 0.8); }

}  // namespace

TEST_CASE("prolonged anchor agrees with the Riemannian prolongation") {
  for (int k : {2, 3, 4}) {
    BundleShape sh(2, k);
    Anchor A = prolonged_anchor(base(), sh);
    NonlinearConnection N = prolong_riemann(base(), sh);
    CounterRng rng(200 + k);
    for (int rep = 0; rep < 5; ++rep) {
      JetPoint u = random_point(sh, rng);
      ConnValues cv = connection_values(N, u);
      std::vector<double> M = A(u.u);
      for (int a = 1; a < k; ++a)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) CHECK(std::abs(M[((a - 1) * 2 + i) * 2 + j] - cv.M[a - 1](i, j)) < 1e-12);
    }
  }
}

TEST_CASE("flat Lagrangian: identity Legendre map and |p|^2") {
  BundleShape sh(2, 3);
  LagrangeSpace L{sh, field_from_text("y3_1^2 + y3_2^2", sh, Side::Tangent)};
  CounterRng rng(210);
  JetPoint v = tangent_point(sh, rng);
  JetPoint u = legendre_forward(L, v);
  for (int i = 0; i < 2; ++i) CHECK(u.p(i) == doctest::Approx(v.u[sh.p(i)]));
  auto xi = legendre_inverse(L, u);
  CHECK(std::abs(xi[0] - v.u[sh.p(0)]) < 1e-14);
  ScalarField H = dual_hamiltonian(L, zero_anchor(sh));
  CHECK(std::abs(H(u) - (u.p(0) * u.p(0) + u.p(1) * u.p(1))) < 1e-14);
  LagrangeSpace L2 = dual_lagrangian(H, zero_anchor(sh));
  CHECK(std::abs(L2.L(v) - L.L(v)) < 1e-14);
  auto G = canonical_semispray(L, v);
  CHECK(std::abs(G[0]) < 1e-15);
  CHECK(std::abs(G[1]) < 1e-15);
}

TEST_CASE("electrodynamics: closed forms of p, xi, H and g") {
  BundleShape sh(2, 3);
  Anchor A = prolonged_anchor(base(), sh);
  LagrangeSpace L = electro(sh, A);
  ScalarField H = dual_hamiltonian(L, A);
  CounterRng rng(220);
  for (int rep = 0; rep < 10; ++rep) {
    JetPoint v = tangent_point(sh, rng);
    std::vector<double> x{v.x(0), v.x(1)};
    Mat g = gam(x);
    Mat gi = inverse(g);
    auto b = bvec(x);
    auto shift = anchor_shift(A, v.u);
    std::vector<double> z{v.u[sh.p(0)] + shift[0], v.u[sh.p(1)] + shift[1]};
    JetPoint u = legendre_forward(L, v);
    for (int i = 0; i < 2; ++i) {
      double p = kM * kC * (g(i, 0) * z[0] + g(i, 1) * z[1]) + kE / kM * b[i];
      CHECK(std::abs(u.p(i) - p) < 1e-12);
    }
    auto xi = legendre_inverse(L, u);
    double Hc = 0.0;
    for (int i = 0; i < 2; ++i) {
      double s = 0.0;
      for (int h = 0; h < 2; ++h) s += gi(i, h) * (u.p(h) - kE / kM * b[h]);
      CHECK(std::abs(xi[i] - (s / (kM * kC) - shift[i])) < 1e-9);
      for (int j = 0; j < 2; ++j) Hc += gi(i, j) * (u.p(i) - kE / kM * b[i]) * (u.p(j) - kE / kM * b[j]);
    }
    Hc /= kM * kC;
    CHECK(std::abs(H(u) - Hc) < 1e-9);
    MetricPair mp = fundamental_tensor(H, u);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(mp.gUp(i, j) - gi(i, j) / (kM * kC)) < 1e-9);
  }
}

TEST_CASE("round trips, d xi / dp = a^{-1}, anchor independence of g") {
  BundleShape sh(2, 3);
  LagrangeSpace L = quartic(sh);
  Anchor A0 = zero_anchor(sh), A1 = prolonged_anchor(base(), sh);
  Mat c1(2, 2, 0.0), c2(2, 2, 0.0);
  c1(0, 1) = 0.7;
  c1(1, 0) = -0.2;
  c2(0, 0) = 0.4;
  Anchor A2 = constant_anchor(sh, {c1, c2});
  ScalarField H0 = dual_hamiltonian(L, A0), H1 = dual_hamiltonian(L, A1), H2 = dual_hamiltonian(L, A2);
  CounterRng rng(230);
  for (int rep = 0; rep < 15; ++rep) {
    JetPoint v = tangent_point(sh, rng);
    JetPoint u = legendre_forward(L, v);
    auto xi = legendre_inverse(L, u);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(xi[i] - v.u[sh.p(i)]) < 1e-8);
    // phi o xi on a cotangent point
    JetPoint w = random_point(sh, rng, 0.8);
    JetPoint back = w;
    auto xw = legendre_inverse(L, w);
    for (int i = 0; i < 2; ++i) back.u[sh.p(i)] = xw[i];
    JetPoint ww = legendre_forward(L, back);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(ww.p(i) - w.p(i)) < 1e-8);

    Mat ai = inverse(lagrange_tensor(L, v));
    const double h = 1e-5;
    for (int j = 0; j < 2; ++j) {
      JetPoint up = u, um = u;
      up.u[sh.p(j)] += h;
      um.u[sh.p(j)] -= h;
      auto xp = legendre_inverse(L, up), xm = legendre_inverse(L, um);
      for (int i = 0; i < 2; ++i) CHECK(std::abs((xp[i] - xm[i]) / (2 * h) - ai(i, j)) < 1e-7);
    }
    Mat g0 = fundamental_tensor(H0, u).gUp, g1 = fundamental_tensor(H1, u).gUp, g2 = fundamental_tensor(H2, u).gUp;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(g0(i, j) - ai(i, j)) < 1e-9);
        CHECK(std::abs(g1(i, j) - g0(i, j)) < 1e-9);
        CHECK(std::abs(g2(i, j) - g0(i, j)) < 1e-9);
      }
  }
}

TEST_CASE("dual of the dual returns the original") {
  BundleShape sh(2, 3);
  LagrangeSpace L = quartic(sh);
  Anchor A = prolonged_anchor(base(), sh);
  ScalarField H = dual_hamiltonian(L, A);
  LagrangeSpace LL = dual_lagrangian(H, A);
  ScalarField Hc = field_from_text("exp(0.2*x1)*(p1^2 + p1*p2 + p2^2) + 0.1*p1^4 + y1_1*p2 + 0.3*y2_2*p1*x2", sh);
  LagrangeSpace Lc = dual_lagrangian(Hc, A);
  ScalarField HH = dual_hamiltonian(Lc, A);
  CounterRng rng(240);
  for (int rep = 0; rep < 10; ++rep) {
    JetPoint v = tangent_point(sh, rng);
    CHECK(std::abs(LL.L(v) - L.L(v)) < 1e-8);
    JetPoint u = random_point(sh, rng, 0.8);
    CHECK(std::abs(HH(u) - Hc(u)) < 1e-8);
    // fundamental tensor of the dual Lagrangian is g_ij at phi*(v)
    Mat a = lagrange_tensor(Lc, v);
    auto shift = anchor_shift(A, v.u);
    std::vector<double> z{v.u[sh.p(0)] + shift[0], v.u[sh.p(1)] + shift[1]};
    auto p = fiber_newton(Hc, v.u, z);
    JetPoint up = v;
    for (int i = 0; i < 2; ++i) up.u[sh.p(i)] = p[i];
    Mat gd = fundamental_tensor(Hc, up).gDown;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(a(i, j) - gd(i, j)) < 1e-7);
  }
}

TEST_CASE("canonical semispray and its Legendre image") {
  BundleShape sh(2, 3);
  Anchor A = prolonged_anchor(base(), sh);
  LagrangeSpace L = electro(sh, A);
  CounterRng rng(250);
  for (int rep = 0; rep < 5; ++rep) {
    JetPoint v = tangent_point(sh, rng);
    // closed-form dL/dy(3): 2 m c gamma z + 2 e/m b; Gamma taken as d/dt along
    // x(t) = sum y(b) t^b with y(3) frozen, five-point stencils
    auto dLk = [&](const std::vector<double>& w, int j) {
      std::vector<double> x{w[0], w[1]};
      Mat g = gam(x);
      auto b = bvec(x);
      auto shift = anchor_shift(A, w);
      double s = 2 * kE / kM * b[j];
      for (int h = 0; h < 2; ++h) s += 2 * kM * kC * g(j, h) * (w[sh.p(h)] + shift[h]);
      return s;
    };
    auto along = [&](double t) {
      std::vector<double> w = v.u;
      for (int i = 0; i < 2; ++i) {
        double y0 = v.x(i), y1 = v.y(1, i), y2 = v.y(2, i), y3 = v.u[sh.p(i)];
        w[sh.x(i)] = y0 + y1 * t + y2 * t * t + y3 * t * t * t;
        w[sh.y(1, i)] = y1 + 2 * y2 * t + 3 * y3 * t * t;
        w[sh.y(2, i)] = y2 + 3 * y3 * t;
      }
      return w;
    };
    const double h = 1e-3;
    auto stencil = [h](auto f) { return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h); };
    Mat g = gam(std::vector<double>{v.x(0), v.x(1)});
    Mat gi = inverse(g);
    std::vector<double> brace(2);
    for (int j = 0; j < 2; ++j) {
      double gamma_j = stencil([&](double t) { return dLk(along(t), j); });
      double dl = stencil([&](double e) {
        JetPoint w = v;
        w.u[sh.y(2, j)] += e;
        return L.L(w);
      });
      brace[j] = gamma_j - dl;
    }
    auto G = canonical_semispray(L, v);
    for (int i = 0; i < 2; ++i) {
      double r = (gi(i, 0) * brace[0] + gi(i, 1) * brace[1]) / (2 * kM * kC * 4);
      CHECK(std::abs(G[i] - r) < 1e-8);
    }
  }
  LagrangeSpace Q = quartic(sh);
  for (int rep = 0; rep < 5; ++rep) {
    JetPoint u = random_point(sh, rng, 0.8);
    auto e1 = dual_eta(Q, u), e2 = dual_eta_from_xi(Q, u);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(e1[i] - e2[i]) < 1e-8);
  }
  // the induced connection: M*_(a) = -d xi / d y(k-a)
  NonlinearConnection N = legendre_connection(Q);
  JetPoint u = random_point(sh, rng, 0.8);
  ConnValues cv = connection_values(N, u);
  for (int s = 0; s < 2; ++s) {
    auto gx = gradient(xi_field(Q, s), u);
    for (int a = 1; a < 3; ++a)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(cv.M[a - 1](s, j) + gx[sh.y(3 - a, j)]) < 1e-9);
  }
}

TEST_CASE("fiber inversion failure is reported with its trace") {
  BundleShape sh(1, 2);
  LagrangeSpace L{sh, field_from_text("2*sqrt(1 + y2_1^2)", sh, Side::Tangent)};
  JetPoint u(sh, {0.0, 0.0, 1.5});
  try {
    legendre_inverse(L, u);
    FAIL("expected an inversion error");
  } catch (const InversionError& e) {
    CHECK(e.trace.size() > 1);
  }
}
