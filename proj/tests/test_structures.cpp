#include <doctest.h>

#include <cmath>

#include "hk/structures.hpp"

using namespace hk;

namespace {

NonlinearConnection skew_connection(const BundleShape& sh) {
  return primal_connection(sh, "skew", [sh](const auto& u) {
    using S = std::decay_t<decltype(u[0])>;
    using std::sin;
    int n = sh.n;
    ConnCoeffsT<S> c;
    for (int a = 1; a < sh.k; ++a) {
      SMat<S> m(n, n, zero_like(u[0]));
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(j, i) = sin(u[sh.x(i)] * double(a) + u[sh.y(1, j)]) * 0.3;
      c.N.push_back(m);
    }
    c.Nlow = SMat<S>(n, n, zero_like(u[0]));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c.Nlow(i, j) = u[sh.x(i)] * u[sh.p(j)] * 0.4 + double(i - j) * 0.25;
    return c;
  });
}

}  // namespace

TEST_CASE("flat contact structure, n = 1, k = 2") {
  BundleShape sh(1, 2);
  auto g = hamilton_metric(field_from_text("p1^2", sh));
  JetPoint u(sh, {0.3, -0.5, 0.8});
  LiftedStructures s = lifted_structures(g, zero_connection(sh), u);
  // columns: delta_x -> -d_p, V -> 0, d_p -> delta_x
  Mat F(3, 3, 0.0);
  F(2, 0) = -1.0;
  F(0, 2) = 1.0;
  CHECK(max_abs_diff(s.F, F) == 0.0);
  CHECK(max_abs_diff(s.G, identity(3)) == 0.0);
  StructureChecks c = check_structures(s, connection_values(zero_connection(sh), u));
  CHECK(c.contact == 0.0);
  CHECK(c.rank_F == 2);
  CHECK(c.theta_canonical == 0.0);
}

TEST_CASE("contact and metric structures on a generic space") {
  for (int k : {2, 3, 4}) {
    BundleShape sh(2, k);
    auto g = hamilton_metric(field_from_text("exp(0.3*x1)*(p1^2 + p2^2) + 0.4*p1*p2*y1_2 + 0.1*p2^4", sh));
    auto N = skew_connection(sh);
    CounterRng rng(300 + k);
    for (int rep = 0; rep < 20; ++rep) {
      JetPoint u = random_point(sh, rng);
      LiftedStructures s = lifted_structures(g, N, u);
      ConnValues cv = connection_values(N, u);
      StructureChecks c = check_structures(s, cv);
      CHECK(c.contact < 1e-10);
      CHECK(c.rank_F == 4);
      CHECK(c.skew < 1e-10);
      CHECK(c.theta_antisym < 1e-14);
      CHECK(c.theta_pattern < 1e-12);
      CHECK(c.kernel == 0.0);
      CHECK(c.contact_free == 0.0);
      CHECK(c.rank_Fbb == 4);
      // G symmetric positive definite
      auto sv = singular_values(s.G);
      CHECK(sv.minCoeff() > 0.0);
      CHECK(max_abs_diff(s.G, transpose(s.G)) == 0.0);
      // with a non-symmetric N_ij, theta = dp^dx + (N_ba - N_ab) on the dx dx block
      Mat th = to_natural(s.theta, s.coframe);
      Mat expect = canonical_two_form(sh);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) expect(a, b) = cv.Nlow(b, a) - cv.Nlow(a, b);
      CHECK(max_abs_diff(th, expect) < 1e-12);
    }
  }
}

TEST_CASE("symmetric N_ij: theta is the presymplectic dp ^ dx") {
  BundleShape sh(2, 3);
  auto base = make_base_metric(2, "g", [](const auto& x) {
    using S = std::decay_t<decltype(x[0])>;
    using std::exp;
    SMat<S> m(2, 2, zero_like(x[0]));
    m(0, 0) = exp(x[0] * 0.5) + 1.0;
    m(0, 1) = m(1, 0) = x[1] * 0.2;
    m(1, 1) = x[0] * x[0] + 2.0;
    return m;
  });
  auto N = prolong_riemann(base, sh);
  auto g = hamilton_metric(field_from_text("p1^2 + 2*p2^2 + 0.3*x2*p1*p2", sh));
  CounterRng rng(310);
  for (int rep = 0; rep < 20; ++rep) {
    JetPoint u = random_point(sh, rng);
    LiftedStructures s = lifted_structures(g, N, u);
    StructureChecks c = check_structures(s, connection_values(N, u));
    CHECK(c.nlow_asym < 1e-15);
    CHECK(c.theta_canonical < 1e-12);
  }
}
