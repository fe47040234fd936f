#include "hk/metric.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hk {

MetricPair metric_pair(const Mat& gUp, const JetPoint& u) {
  int n = gUp.r;
  MetricPair m;
  m.gUp = gUp;
  Eigen::VectorXd s = singular_values(gUp);
  double smax = s.size() ? s(0) : 0.0, smin = s.size() ? s(s.size() - 1) : 0.0;
  if (!(smax > 0.0) || smin < 1e-10 * smax)
    throw DegeneracyError("fundamental tensor is degenerate at " + u.str());
  m.cond = smax / smin;
  if (!(m.cond < kCondMax)) throw DegeneracyError("fundamental tensor is ill-conditioned at " + u.str());
  Eigen::MatrixXd e = to_eigen(gUp);
  m.gDown = from_eigen(e.partialPivLu().inverse());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (e + e.transpose()), Eigen::EigenvaluesOnly);
  for (int i = 0; i < n; ++i) (es.eigenvalues()(i) > 0 ? m.npos : m.nneg)++;
  return m;
}

namespace {

Mat momentum_hessian(const ScalarField& H, const JetPoint& u) {
  Expansion ex(u.shape, u.u, 2);
  Taylor t = H(ex.X);
  int n = u.shape.n;
  Mat g(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = 0.5 * t.partial({u.shape.p(i), u.shape.p(j)});
  return g;
}

}  // namespace

MetricPair fundamental_tensor(const ScalarField& H, const JetPoint& u) { return metric_pair(momentum_hessian(H, u), u); }

MetricModel hamilton_metric(const ScalarField& H) {
  MetricModel m;
  m.shape = H.shape;
  m.name = H.name;
  m.hamiltonian = true;
  BundleShape sh = H.shape;
  m.up = [H, sh](const std::vector<double>& u) { return momentum_hessian(H, JetPoint(sh, u)); };
  m.up_t = [H](const Expansion& ex) {
    Taylor t = H(ex.X);
    int n = ex.shape.n;
    std::vector<Taylor> dp;
    for (int i = 0; i < n; ++i) dp.push_back(d(t, ex.shape.p(i)));
    TMat g(n, n, ex.zero());
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = d(dp[i], ex.shape.p(j)) * 0.5;
    return g;
  };
  return m;
}

MetricPair metric_at(const MetricModel& g, const JetPoint& u) { return metric_pair(g.up(u.u), u); }

DTensor c_up_tensor(const ScalarField& H, const JetPoint& u) {
  int n = u.shape.n;
  Taylor t = expand(H, u, 3);
  DTensor c(n, {{Variance::Up, u.shape.k}, {Variance::Up, u.shape.k}, {Variance::Up, u.shape.k}});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int h = 0; h < n; ++h) c.at({i, j, h}) = -0.25 * t.partial({u.shape.p(i), u.shape.p(j), u.shape.p(h)});
  return c;
}

namespace {

// dg[h](i,j) = d g^{ij} / dp_h at u
std::vector<Mat> momentum_derivs(const MetricModel& g, const JetPoint& u) {
  int n = u.shape.n;
  Expansion ex(u.shape, u.u, g.hamiltonian ? 3 : 1);
  TMat gt = g.up_t(ex);
  std::vector<Mat> dg(n, Mat(n, n, 0.0));
  for (int h = 0; h < n; ++h)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[h](i, j) = gt(i, j).coef(ex.sp->var_index(u.shape.p(h)));
  return dg;
}

}  // namespace

DTensor c_mixed_tensor(const MetricModel& g, const JetPoint& u) {
  int n = u.shape.n, k = u.shape.k;
  MetricPair mp = metric_at(g, u);
  auto dg = momentum_derivs(g, u);
  DTensor c(n, {{Variance::Down, k}, {Variance::Up, k}, {Variance::Up, k}});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int h = 0; h < n; ++h) {
        double s = 0.0;
        for (int q = 0; q < n; ++q) s += mp.gDown(i, q) * (dg[j](q, h) + dg[h](j, q) - dg[q](j, h));
        c.at({i, j, h}) = -0.5 * s;
      }
  return c;
}

ReducibilityProbe reducibility_probe(const MetricModel& g, const JetPoint& u, double tol) {
  int n = u.shape.n;
  auto dg = momentum_derivs(g, u);
  ReducibilityProbe r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int h = 0; h < n; ++h) {
        double c = -0.5 * dg[h](i, j);
        r.scale = std::max(r.scale, std::abs(c));
        // symmetric in (i,j) already; compare with the (i,h) swap
        r.defect = std::max(r.defect, std::abs(c + 0.5 * dg[j](i, h)));
      }
  r.reducible = r.defect <= tol * std::max(1.0, r.scale);
  return r;
}

}  // namespace hk
