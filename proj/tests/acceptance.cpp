// Acceptance run: one line per criterion, PASS or FAIL, exit 1 on any FAIL.
//
// Closed-form oracles are written out by hand here; the remaining criteria
// read the rows of the verification suites over every catalog space (and a
// few other shapes).

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "hk/suite.hpp"

using namespace hk;

namespace {

struct Verdict {
  bool pass = true;
  double worst = 0.0;
  int rows = 0;
  std::string why;

  void need(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (why.size() < 300) why += (why.empty() ? "" : "; ") + what;
    }
  }
  void residual(double r, double tol, const std::string& what) {
    worst = std::max(worst, r);
    need(r <= tol, what + " " + std::to_string(r));
  }
};

int failures = 0;

void print(int id, const std::string& name, const Verdict& v, const std::string& detail) {
  if (!v.pass) ++failures;
  std::printf("criterion %2d  %-4s  %-24s %s%s%s\n", id, v.pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
              v.why.empty() ? "" : "  :: ", v.why.c_str());
}

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

SpaceSpec spec_of(const std::string& kind, int n = 2, int k = 3) {
  SpaceSpec s;
  s.kind = kind;
  s.n = n;
  s.k = k;
  return s;
}

// reports of every suite, keyed by a label
struct Run {
  std::string label;
  Space space;
  Report rep;
};

std::vector<Run> runs;

void run_all() {
  std::vector<SpaceSpec> specs;
  for (const auto& kd : catalog_kinds()) specs.push_back(spec_of(kd));
  specs.push_back(spec_of("electrodynamics", 3, 2));
  specs.push_back(spec_of("riemann_prolong", 2, 4));
  specs.push_back(spec_of("cartan_quadratic", 3, 2));
  specs.push_back(spec_of("optics", 3, 4));
  for (const auto& sp : specs) {
    Run r;
    r.label = sp.kind + "(" + std::to_string(sp.n) + "," + std::to_string(sp.k) + ")";
    r.space = build_space(sp);
    r.rep = run_suite(r.space, "all", 42, 100);
    runs.push_back(std::move(r));
  }
}

// aggregate rows whose name starts with prefix; errors and failures both fail
void rows_into(Verdict& v, const std::string& prefix, int min_points, int& ran, const std::string& only_kind = "") {
  for (const auto& r : runs) {
    if (!only_kind.empty() && r.space.spec.kind != only_kind) continue;
    for (const Row& w : r.rep.rows) {
      if (w.check.rfind(prefix, 0) != 0) continue;
      ++v.rows;
      if (w.point >= 0) {
        v.need(false, r.label + " " + w.check + " #" + std::to_string(w.point) + " " + w.note);
        continue;
      }
      if (w.skipped) continue;
      ++ran;
      if (w.cmp == Compare::AtMost) v.worst = std::max(v.worst, w.residual);
      v.need(w.pass, r.label + " " + w.check + " " + sci(w.residual));
      v.need(w.points >= min_points, r.label + " " + w.check + " used " + std::to_string(w.points) + " points");
    }
  }
}

Verdict from_rows(const std::vector<std::string>& prefixes, int min_points, const std::string& only_kind = "") {
  Verdict v;
  for (const auto& p : prefixes) {
    int ran = 0;
    rows_into(v, p, min_points, ran, only_kind);
    v.need(ran > 0, p + " never ran");
  }
  return v;
}

std::vector<JetPoint> points_of(const Space& s, std::uint64_t seed, int count) {
  CounterRng rng(seed);
  return sample_points(s, rng, count);
}

Eigen::Matrix2d as_e2(const Mat& m) {
  Eigen::Matrix2d e;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) e(i, j) = m(i, j);
  return e;
}

// ---- 1: charged particle, gamma and its x-derivatives written out by hand

void electrodynamics() {
  SpaceSpec sp = spec_of("electrodynamics");
  sp.m = 1.3;
  sp.c = 0.7;
  sp.e = 0.9;
  sp.gamma = {"3 + sin(x2)", "0.5*sin(x1 + x2)", "0.5*sin(x1 + x2)", "2 + x1^2"};
  sp.b = {"x2", "-x1^2"};
  Space s = build_space(sp);
  NLinearConnection D = canonical_metrical(s.metric, s.N);
  auto gam = [](double x1, double x2) {
    Eigen::Matrix2d g;
    g << 3 + std::sin(x2), 0.5 * std::sin(x1 + x2), 0.5 * std::sin(x1 + x2), 2 + x1 * x1;
    return g;
  };
  // dg[h](i, j) = d gamma_ij / dx^h
  auto dgam = [](double x1, double x2) {
    std::array<Eigen::Matrix2d, 2> d;
    double c = 0.5 * std::cos(x1 + x2);
    d[0] << 0, c, c, 2 * x1;
    d[1] << std::cos(x2), c, c, 0;
    return d;
  };
  Verdict g, h;
  auto pts = points_of(s, 101, 100);
  g.need(pts.size() == 100, "sampling");
  for (const auto& u : pts) {
    double x1 = u.u[0], x2 = u.u[1];
    Eigen::Matrix2d gi = gam(x1, x2).inverse();
    Eigen::Matrix2d want = gi / (sp.m * sp.c);
    Eigen::Matrix2d got = as_e2(metric_at(s.metric, u).gUp);
    g.residual((got - want).cwiseAbs().maxCoeff(), 1e-12, "g^ij");
    auto d = dgam(x1, x2);
    NLinValues cv = coefficient_values(D, u);
    double c = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double G = 0.0;
          for (int s2 = 0; s2 < 2; ++s2) G += 0.5 * gi(i, s2) * (d[j](s2, k) + d[k](s2, j) - d[s2](j, k));
          h.residual(std::abs(cv.H.at({i, j, k}) - G), 1e-9, "H^i_jh");
          c = std::max(c, std::abs(cv.Cw.at({i, j, k})));
          for (const auto& a : cv.Cv) c = std::max(c, std::abs(a.at({i, j, k})));
        }
    h.residual(c, 1e-9, "C");
  }
  Verdict v = g;
  v.need(h.pass, h.why);
  print(1, "electrodynamics", v,
        "max|g - gamma^-1/mc| " + sci(g.worst) + " <= 1e-12, max|H - Christoffel|, |C| " + sci(h.worst) + " <= 1e-9");
}

// ---- 6: H = p.y1 by hand: I^a, E^a vanish identically, and the suite rows

void zermelo() {
  Verdict v = from_rows({"dynamics.zermelo_flags", "dynamics.zermelo_energies"}, 20);
  for (int k : {2, 3, 4}) {
    BundleShape sh(2, k);
    ScalarField H = field_from_text("p1*y1_1 + p2*y1_2", sh);
    CounterRng rng(600 + k);
    for (int t = 0; t < 50; ++t) {
      CurveGerm c;
      c.shape = sh;
      c.x.assign(2, std::vector<double>(k + 4));
      c.p.assign(2, std::vector<double>(k + 4));
      for (auto& a : c.x)
        for (auto& b : a) b = rng.uniform(-1, 1);
      for (auto& a : c.p)
        for (auto& b : a) b = rng.uniform(-1, 1);
      EnergyReport er = invariants_and_energies(H, c);
      v.need(er.zermelo_all(), "Zermelo flag at k = " + std::to_string(k));
      for (double e : er.E) v.residual(std::abs(e), 1e-8, "E");
    }
  }
  print(6, "zermelo_energies", v, "all flags hold, max|E^a| " + sci(v.worst) + " < 1e-8 (k = 2, 3, 4)");
}

// ---- 8: relativistic optics, the lowered metric written out by hand

void optics() {
  SpaceSpec sp = spec_of("optics");
  sp.gamma = {"1 + 0.5*x1^2", "0.2*x1", "0.2*x1", "2*exp(x2)"};
  sp.index = "1.5 + 0.3*sin(x2) + 0.1*p1^2";
  Space s = build_space(sp);
  Verdict inv, red;
  auto pts = points_of(s, 801, 100);
  inv.need(pts.size() == 100, "sampling");
  double least_defect = 1e300;
  for (const auto& u : pts) {
    double x1 = u.u[0], x2 = u.u[1];
    Eigen::Vector2d p(u.u[u.shape.p(0)], u.u[u.shape.p(1)]);
    Eigen::Matrix2d gam;
    gam << 1 + 0.5 * x1 * x1, 0.2 * x1, 0.2 * x1, 2 * std::exp(x2);
    double nr = 1.5 + 0.3 * std::sin(x2) + 0.1 * p(0) * p(0);
    double f = 1 - 1 / (nr * nr);
    Eigen::Matrix2d gi = gam.inverse();
    Eigen::Vector2d P = gi * p;
    double a = 1 + f * p.dot(P);
    Eigen::Matrix2d up = gi + f * P * P.transpose();
    Eigen::Matrix2d down = gam - (f / a) * p * p.transpose();
    Eigen::Matrix2d got = as_e2(metric_at(s.metric, u).gUp);
    inv.residual((got - up).cwiseAbs().maxCoeff() / std::max(1.0, up.cwiseAbs().maxCoeff()), 1e-12, "g^ij");
    inv.residual((got * down - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12, "g^ih g_hj - delta");
    ReducibilityProbe pr = reducibility_probe(s.metric, u);
    least_defect = std::min(least_defect, pr.defect);
    red.need(!pr.reducible, "reducible at a sample");
  }
  Verdict rows = from_rows({"metric.inverse", "metric.not_reducible"}, 100, "optics");
  Verdict v = inv;
  v.need(red.pass, red.why);
  v.need(rows.pass, rows.why);
  print(8, "optics", v,
        "max|g^ih g_hj - delta| " + sci(inv.worst) + " < 1e-12, not reducible (least C defect " + sci(least_defect) + ")");
}

// ---- 12: the same suite twice, byte for byte

void determinism() {
  Verdict v;
  for (const auto& r : runs) {
    if (r.space.spec.n != 2 || r.space.spec.k != 3) continue;
    Report again = run_suite(r.space, "all", 42, 100);
    v.need(report_json(again) == report_json(r.rep), r.label + " differs");
    ++v.rows;
  }
  print(12, "determinism", v, std::to_string(v.rows) + " spaces, seed 42, identical JSON");
}

}  // namespace

int main() {
  electrodynamics();
  run_all();

  {
    Verdict v = from_rows({"connection.metricity."}, 100);
    print(2, "metricity", v, "max residual " + sci(v.worst) + " < 1e-7, " + std::to_string(runs.size()) + " spaces");
  }
  {
    Verdict v = from_rows({"curvature.metric_antisymmetry", "curvature.pair_antisymmetry"}, 50);
    print(3, "curvature_antisymmetry", v, "max residual " + sci(v.worst) + " < 1e-6");
  }
  {
    Verdict v = from_rows({"dynamics.energy_drift", "dynamics.rk4_ratio"}, 1, "custom_expr");
    double ratio = 0.0;
    for (const auto& r : runs)
      if (r.space.spec.kind == "custom_expr" && r.space.spec.n == 2)
        for (const Row& w : r.rep.rows)
          if (w.check == "dynamics.rk4_ratio") ratio = w.residual;
    // straight lines on the flat space too
    Space flat = build_space(spec_of("flat"));
    Trajectory tr = integrate_hj(*flat.H, {0.3, -0.2}, {0.4, 0.5}, 1.0, 1e-3);
    const Sample& e = tr.samples.back();
    double line = std::max(std::abs(e.x[0] - (0.3 + 0.4)), std::abs(e.x[1] - (-0.2 + 0.5)));
    v.residual(line, 1e-12, "flat straight line");
    v.residual(tr.drift, 1e-6, "flat drift");
    print(4, "energy_drift_rk4", v, "coupled toy: drift <= 1e-6 at step 1e-3, ratio " + std::to_string(ratio) + " in [12, 20]");
  }
  {
    Verdict v = from_rows({"homogeneity.euler_K", "homogeneity.scaling_K"}, 100, "cartan_quadratic");
    print(5, "cartan_homogeneity", v, "max residual " + sci(v.worst));
  }
  zermelo();
  {
    Verdict v = from_rows({"legendre.xi_phi", "legendre.phi_xi", "legendre.dual_of_dual_H", "legendre.dual_of_dual_L",
                           "legendre.anchor_independence"},
                          1);
    print(7, "legendre", v, "max residual " + sci(v.worst));
  }
  optics();
  {
    Verdict v = from_rows({"covariance.metric", "covariance.liouville"}, 1);
    print(9, "covariance", v, "max residual " + sci(v.worst) + " < 1e-8");
  }
  {
    Verdict v = from_rows({"structures.contact", "structures.rank_F", "structures.skew", "structures.theta_dp_dx"}, 1);
    print(10, "structures", v, "max residual " + sci(v.worst));
  }
  {
    Verdict v = from_rows({"dynamics.poisson_jacobi", "dynamics.sigma0"}, 1);
    print(11, "poisson", v, "max residual " + sci(v.worst));
  }
  determinism();
  // and nothing outside the criteria may fail either
  {
    int all = 0, bad = 0;
    std::string which;
    for (const auto& r : runs)
      for (const Row& w : r.rep.rows) {
        ++all;
        if (!w.pass) {
          ++bad;
          if (which.size() < 300) which += " " + r.label + ":" + w.check;
        }
      }
    std::printf("suite rows: %d over %zu spaces, %d failed%s\n", all, runs.size(), bad, which.c_str());
    if (bad) ++failures;
  }
  std::printf("%d failed\n", failures);
  return failures ? 1 : 0;
}
