#include "hk/field.hpp"

#include <cmath>

namespace hk {

ScalarField field_from_expr(const Expr& e, const BundleShape& sh, Side side) {
  Expr r = resolve(e, sh, side);
  return make_field(sh, print_expr(e), [r](const auto& u) { return eval(r, u); });
}

ScalarField field_from_text(const std::string& src, const BundleShape& sh, Side side) {
  return field_from_expr(parse_expr(src), sh, side);
}

Expansion::Expansion(const BundleShape& sh, const std::vector<double>& at, int order)
    : shape(sh), u(at), sp(TaylorSpace::get(sh.dim(), order)) {
  if (static_cast<int>(at.size()) != sh.dim()) throw ShapeError("expansion point has wrong size");
  for (int i = 0; i < sh.dim(); ++i) X.push_back(Taylor::variable(sp, i, at[i]));
}

std::vector<double> gradient(const ScalarField& f, const JetPoint& u) {
  Expansion ex(u.shape, u.u, 1);
  Taylor t = f(ex.X);
  std::vector<double> g(u.shape.dim());
  for (int i = 0; i < u.shape.dim(); ++i) g[i] = t.coef(ex.sp->var_index(i));
  return g;
}

Taylor expand(const ScalarField& f, const JetPoint& u, int order) {
  Expansion ex(u.shape, u.u, order);
  return f(ex.X);
}

double euler_operator(const ScalarField& H, const JetPoint& u, EulerKind kind) {
  const auto& sh = u.shape;
  std::vector<double> g = gradient(H, u);
  double s = 0.0;
  if (kind != EulerKind::Momentum)
    for (int a = 1; a < sh.k; ++a)
      for (int i = 0; i < sh.n; ++i) s += a * u.y(a, i) * g[sh.y(a, i)];
  if (kind != EulerKind::Liouville) {
    double w = kind == EulerKind::Combined ? sh.k : 1.0;
    for (int i = 0; i < sh.n; ++i) s += w * u.p(i) * g[sh.p(i)];
  }
  return s;
}

namespace {

JetPoint scaled(const JetPoint& u, double a, EulerKind kind) {
  if (kind == EulerKind::Combined) return scale_fibers(u, a);
  std::vector<double> v = u.u;
  const auto& sh = u.shape;
  if (kind == EulerKind::Liouville) {
    double f = 1.0;
    for (int b = 1; b < sh.k; ++b) {
      f *= a;
      for (int i = 0; i < sh.n; ++i) v[sh.y(b, i)] *= f;
    }
  } else {
    for (int i = 0; i < sh.n; ++i) v[sh.p(i)] *= a;
  }
  return JetPoint(sh, v);
}

}  // namespace

HomogeneityVerdict homogeneity_degree(const ScalarField& H, const JetPoint& u, EulerKind kind) {
  HomogeneityVerdict v;
  double h0 = H(u);
  if (h0 == 0.0) {
    v.indeterminate = true;
    return v;
  }
  v.r = euler_operator(H, u, kind) / h0;
  v.homogeneous = true;
  for (double a : {0.5, 2.0, 3.0}) {
    double want = std::pow(a, v.r) * h0;
    double got = H(scaled(u, a, kind));
    double rel = std::abs(got - want) / std::abs(want);
    v.worst_rel = std::max(v.worst_rel, rel);
    if (!(rel < 1e-7)) v.homogeneous = false;
  }
  return v;
}

}  // namespace hk
