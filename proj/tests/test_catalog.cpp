#include <doctest.h>

#include <cmath>

#include "hk/suite.hpp"

using namespace hk;

TEST_CASE("config: sections, lists, comments") {
  Config c = parse_config(R"(
# comment
[space]
kind = "electrodynamics"   # trailing
n = 3
k = 2
m = 2.5
b = ["x1", "x2", "0"]

[suite]
name = "metric"
seed = 7
points = 12

[integrate]
t1 = 0.5
step = 0.01
x0 = [1, 2, 3]
out = "traj.csv"
)");
  CHECK(c.space.kind == "electrodynamics");
  CHECK(c.space.n == 3);
  CHECK(c.space.k == 2);
  CHECK(c.space.m == 2.5);
  CHECK(c.space.b == std::vector<std::string>{"x1", "x2", "0"});
  CHECK(c.suite.name == "metric");
  CHECK(c.suite.seed == 7);
  CHECK(c.suite.points == 12);
  CHECK(c.integrate.t1 == 0.5);
  CHECK(c.integrate.x0 == std::vector<double>{1, 2, 3});
  CHECK(c.integrate.out == "traj.csv");
  CHECK(c.where.at("m") == std::pair<int, int>{7, 5});
}

TEST_CASE("config: errors carry line and column") {
  auto at = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::pair<int, int>{e.line, e.col};
    }
    return std::pair<int, int>{0, 0};
  };
  CHECK(at("[space]\nkind = \"nope\"\n") == std::pair<int, int>{2, 8});
  CHECK(at("[space]\nwhat = 1\n") == std::pair<int, int>{2, 1});
  CHECK(at("[spaces]\n") == std::pair<int, int>{1, 2});
  CHECK(at("n = 2\n") == std::pair<int, int>{1, 1});
  CHECK(at("[space]\nn = 9\n") == std::pair<int, int>{2, 5});
  CHECK(at("[integrate]\nstep = -1\n") == std::pair<int, int>{2, 8});
  // column of the offending character inside the quoted expression
  CHECK(at("[space]\nhamiltonian = \"p1 + )\"\n") == std::pair<int, int>{2, 21});
}

TEST_CASE("electrodynamics with gamma = I and b = 0 is |p|^2 / mc") {
  SpaceSpec sp;
  sp.kind = "electrodynamics";
  sp.m = 2.0;
  sp.c = 3.0;
  sp.gamma = {"1", "0", "0", "1"};
  sp.b = {"0", "0"};
  Space s = build_space(sp);
  JetPoint u(s.shape, {0.1, 0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8});
  CHECK((*s.H)(u) == doctest::Approx((0.49 + 0.64) / 6.0).epsilon(1e-14));
}

TEST_CASE("a charged field moves H off the free value by the potential") {
  SpaceSpec sp;
  sp.kind = "electrodynamics";
  sp.e = 0.5;
  sp.gamma = {"1", "0", "0", "1"};
  sp.b = {"x2", "0"};
  Space s = build_space(sp);
  JetPoint u(s.shape, {0.1, 0.4, 0, 0, 0, 0, 1.0, 2.0});
  // |p - (e/m) b|^2 = (1 - 0.5*0.4)^2 + 2^2
  CHECK((*s.H)(u) == doctest::Approx(0.64 + 4.0).epsilon(1e-14));
}

TEST_CASE("optics index n <= 1 is a domain error") {
  SpaceSpec sp;
  sp.kind = "optics";
  sp.index = "1 + 0.5*sin(x1)";
  Space s = build_space(sp);
  JetPoint ok(s.shape, {1.0, 0, 0, 0, 0, 0, 0.3, 0.1});
  JetPoint bad(s.shape, {-1.0, 0, 0, 0, 0, 0, 0.3, 0.1});
  CHECK_NOTHROW(metric_at(s.metric, ok));
  CHECK_THROWS_AS(metric_at(s.metric, bad), DomainError);
  sp.index = "0.9";
  CHECK_THROWS_AS(build_space(sp), SpecError);
}

TEST_CASE("optics with an infinite index is the conformal metric plus PP") {
  SpaceSpec sp;
  sp.kind = "optics";
  sp.index = "inf";
  sp.gamma = {"2", "0", "0", "4"};
  Space s = build_space(sp);
  JetPoint u(s.shape, {0.1, 0.2, 0, 0, 0, 0, 1.0, 2.0});
  Mat g = metric_at(s.metric, u).gUp;
  // P = (0.5, 0.5), f = 1
  CHECK(g(0, 0) == doctest::Approx(0.75));
  CHECK(g(0, 1) == doctest::Approx(0.25));
  CHECK(g(1, 1) == doctest::Approx(0.5));
  // a = 1 + |p|^2 = 2.5, |p|^2 = 1/2 + 4/4
  CHECK(s.energy(u) == doctest::Approx(2.5 * 1.5));
}

TEST_CASE("spec errors name the key") {
  SpaceSpec sp;
  sp.kind = "electrodynamics";
  sp.b = {"y1_1", "0"};
  try {
    build_space(sp);
    FAIL("expected a SpecError");
  } catch (const SpecError& e) {
    CHECK(e.key == "b");
  }
  sp = SpaceSpec{};
  sp.c = 0;
  CHECK_THROWS_AS(build_space(sp), SpecError);
}

TEST_CASE("reports: deterministic JSON, merge counts failures") {
  SpaceSpec sp;
  sp.kind = "flat";
  Space s = build_space(sp);
  Report a = run_suite(s, "metric", 42, 10), b = run_suite(s, "metric", 42, 10);
  CHECK(report_json(a) == report_json(b));
  CHECK(a.failed() == 0);
  Report c = a;
  c.rows[0].pass = false;
  int failed = -1;
  std::string doc = merge_reports({report_json(a), report_json(c)}, failed);
  CHECK(failed == 1);
  CHECK(doc.find(kReportSetSchema) != std::string::npos);
  Report d = run_suite(s, "metric", 43, 10);
  CHECK(report_json(d) != report_json(a));
}
