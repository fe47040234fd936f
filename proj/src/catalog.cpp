#include "hk/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace hk {

namespace {

std::string xs(int i) { return "x" + std::to_string(i + 1); }
std::string ys(int a, int i) { return "y" + std::to_string(a) + "_" + std::to_string(i + 1); }
std::string ps(int i) { return "p" + std::to_string(i + 1); }

std::string sum_sq(int n, const std::function<std::string(int)>& v) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " + " : "") + v(i) + "^2";
  return s;
}

void collect_vars(const Expr& e, std::vector<const Node*>& out) {
  if (!e) return;
  if (e->op == Op::Var) out.push_back(e.get());
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

// allowed: 'x' always; 'y' up to block ymax; 'p' if withp
void check_vars(const Expr& e, int ymax, bool withp, const std::string& key) {
  std::vector<const Node*> vs;
  collect_vars(e, vs);
  for (const Node* v : vs) {
    if (v->kind == 'y' && v->block > ymax)
      throw SpecError(key, ymax == 0 ? "may depend on x only" : "may not depend on y" + std::to_string(v->block));
    if (v->kind == 'p' && !withp) throw SpecError(key, "may not depend on p");
  }
}

Expr compile(const std::string& src, const BundleShape& sh, const std::string& key) {
  try {
    return resolve(parse_expr(src), sh);
  } catch (const ParseError& e) {
    throw SpecError(key, e.what());
  } catch (const ShapeError& e) {
    throw SpecError(key, e.what());
  }
}

std::vector<Expr> compile_all(const std::vector<std::string>& src, std::size_t want, const BundleShape& sh,
                              const std::string& key, int ymax, bool withp) {
  if (src.size() != want)
    throw SpecError(key, "expected " + std::to_string(want) + " entries, got " + std::to_string(src.size()));
  std::vector<Expr> r;
  for (const auto& s : src) {
    r.push_back(compile(s, sh, key));
    check_vars(r.back(), ymax, withp, key);
  }
  return r;
}

bool y1_only(const Expr& e) {
  std::vector<const Node*> vs;
  collect_vars(e, vs);
  for (const Node* v : vs)
    if (v->kind == 'y' && v->block > 1) return false;
  return true;
}

template <class S>
SMat<S> sym_matrix(const std::vector<Expr>& E, int n, const std::vector<S>& u) {
  SMat<S> m(n, n, zero_like(u[0]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      if (i == j)
        m(i, i) = eval(E[i * n + i], u);
      else
        m(i, j) = m(j, i) = (eval(E[i * n + j], u) + eval(E[j * n + i], u)) * 0.5;
    }
  return m;
}

// H = 1/(mc) gamma^ij (p - (e/m) b)_i (p - (e/m) b)_j
template <class S>
S quadratic_h(const BaseMetric& base, const std::vector<Expr>& B, double mc, double em, const BundleShape& sh,
              const std::vector<S>& u) {
  int n = sh.n;
  std::vector<S> x(u.begin(), u.begin() + n);
  SMat<S> gi = inverse(base(x));
  std::vector<S> q;
  for (int i = 0; i < n; ++i) q.push_back(B.empty() ? u[sh.p(i)] : u[sh.p(i)] - eval(B[i], x) * em);
  S s = zero_like(u[0]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s = s + gi(i, j) * q[i] * q[j];
  return s * (1.0 / mc);
}

// N_ij = gamma^h_ij p_h + (e/c)(b_i|j + b_j|i)
NonlinearConnection electro_connection(const BaseMetric& base, const std::vector<Expr>& B, double ec,
                                       const BundleShape& sh) {
  NonlinearConnection P = prolong_riemann(base, sh);
  bool trivial = ec == 0.0 || std::all_of(B.begin(), B.end(), [](const Expr& e) { return e->op == Op::Num && e->value == 0.0; });
  if (B.empty() || trivial) return P;
  int n = sh.n;
  std::vector<Expr> dB;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dB.push_back(diff(B[i], sh.x(j)));
  NonlinearConnection c = P;
  c.name = "electrodynamics";
  c.eval = [P, B, dB, base, ec, n](const Expansion& ex) {
    ConnCoeffs r = P.eval(ex);
    std::vector<Taylor> x(ex.X.begin(), ex.X.begin() + n);
    std::vector<Taylor> G = christoffel(base, x);
    std::vector<Taylor> b;
    for (int i = 0; i < n; ++i) b.push_back(eval(B[i], x));
    auto cov = [&](int i, int j) {
      Taylor s = eval(dB[i * n + j], x);
      for (int q = 0; q < n; ++q) s = s - b[q] * G[(q * n + i) * n + j];
      return s;
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.Nlow(i, j) = r.Nlow(i, j) + (cov(i, j) + cov(j, i)) * ec;
    return r;
  };
  return c;
}

// L = mc gamma_ij z^i z^j + 2 (e/m) b_i z^i, z = y(k) + anchor shift; dual to quadratic_h
LagrangeSpace quadratic_lagrangian(const BaseMetric& base, const std::vector<Expr>& B, double mc, double em,
                                   const BundleShape& sh, const Anchor& A) {
  auto f = [base, B, mc, em, sh, A](const auto& v) {
    using S = std::decay_t<decltype(v[0])>;
    int n = sh.n;
    std::vector<S> x(v.begin(), v.begin() + n);
    SMat<S> g = base(x);
    std::vector<S> shift = anchor_shift(A, v);
    std::vector<S> z;
    for (int i = 0; i < n; ++i) z.push_back(v[sh.p(i)] + shift[i]);
    S s = zero_like(v[0]);
    for (int i = 0; i < n; ++i) {
      if (!B.empty()) s = s + eval(B[i], x) * z[i] * (2.0 * em);
      for (int j = 0; j < n; ++j) s = s + g(i, j) * z[i] * z[j] * mc;
    }
    return s;
  };
  return LagrangeSpace{sh, make_field(sh, "lagrangian", f)};
}

void require_index_gt1(double v) {
  if (!(v > 1.0)) throw DomainError("refractive index n = " + std::to_string(v) + " violates n > 1");
}

// g^ij = gamma^ij + (1 - 1/n^2) P^i P^j, P = gamma^-1 p; f = 1 - 1/n^2
template <class S>
SMat<S> optics_formula(const SMat<S>& gi, const std::vector<S>& p, const S& f) {
  int n = gi.r;
  std::vector<S> P(n, zero_like(p[0]));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P[i] = P[i] + gi(i, j) * p[j];
  SMat<S> g = gi;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = g(i, j) + f * P[i] * P[j];
  return g;
}

}  // namespace

const std::vector<std::string>& catalog_kinds() {
  static const std::vector<std::string> k{"electrodynamics", "cartan_quadratic", "optics", "riemann_prolong", "flat",
                                          "custom_expr"};
  return k;
}

std::vector<double> default_x0(int n) {
  static const double v[] = {0.3, -0.2, 0.1, -0.15};
  return std::vector<double>(v, v + n);
}
std::vector<double> default_p0(int n) {
  static const double v[] = {0.4, 0.5, -0.3, 0.2};
  return std::vector<double>(v, v + n);
}

SpaceSpec with_defaults(SpaceSpec s) {
  if (std::find(catalog_kinds().begin(), catalog_kinds().end(), s.kind) == catalog_kinds().end())
    throw SpecError("kind", "unknown space kind '" + s.kind + "'");
  if (s.n < 1 || s.n > 4) throw SpecError("n", "dimension must be in 1..4");
  if (s.k < 2 || s.k > 4) throw SpecError("k", "order must be in 2..4");
  int n = s.n, k = s.k;
  auto diag = [n](const std::function<std::string(int)>& d, const std::function<std::string(int, int)>& off) {
    std::vector<std::string> g;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g.push_back(i == j ? d(i) : off(i, j));
    return g;
  };
  auto zero = [](int, int) { return std::string("0"); };
  const std::string& kd = s.kind;
  if (s.gamma.empty()) {
    if (kd == "electrodynamics")
      s.gamma = diag([n](int i) { return "2 + sin(" + xs((i + 1) % n) + ")"; },
                     [](int i, int j) { return "0.25*sin(" + xs(i) + " + " + xs(j) + ")"; });
    else if (kd == "riemann_prolong")
      s.gamma = diag([](int) { return std::string("exp(2*x1)"); }, zero);
    else if (kd == "cartan_quadratic")
      s.gamma = diag([](int) { return std::string("exp(-0.4*x1)"); }, zero);
    else if (kd == "optics")
      s.gamma = diag([n](int i) { return "(1 + 0.1*" + std::to_string(i) + ")*exp(0.3*" + xs(n > 1 ? 1 : 0) + ")"; }, zero);
    else if (kd == "flat")
      s.gamma = diag([](int) { return std::string("1"); }, zero);
  }
  if (kd == "electrodynamics" && s.b.empty())
    for (int i = 0; i < n; ++i) s.b.push_back("0.5*" + xs((i + 1) % n) + " - 0.3*" + xs(i) + "^2");
  if (kd == "cartan_quadratic" && s.a.empty()) {
    std::string v2 = "(" + sum_sq(n, [k](int i) { return ys(k - 1, i); }) + ")";
    s.a = diag([&](int i) { return "exp(0.4*x1)*(1 + 0.5*" + ys(k - 1, i) + "^2/" + v2 + ")"; },
               [&](int i, int j) { return "exp(0.4*x1)*0.5*" + ys(k - 1, i) + "*" + ys(k - 1, j) + "/" + v2; });
  }
  if (kd == "optics" && s.index.empty())
    s.index = "sqrt(2 + 0.5*sin(x1) + 0.25*(" + sum_sq(n, ps) + "))";
  if (kd == "custom_expr" && s.hamiltonian.empty()) {
    // the coupled toy
    std::string py;
    for (int i = 0; i < n; ++i) py += (i ? " + " : "") + ps(i) + "*" + ys(1, i);
    s.hamiltonian = sum_sq(n, ps) + " + 0.5*(" + py + ") + 0.1*(" + sum_sq(n, [](int i) { return ys(1, i); }) +
                    ") + 0.5*(" + sum_sq(n, xs) + ")" + (n > 1 ? " + 0.1*x1^2*x2^2" : "");
  }
  return s;
}

BaseMetric base_metric_from(const std::vector<std::string>& entries, int n, const std::string& name) {
  BundleShape sh(n, 2);
  std::vector<Expr> E = compile_all(entries, static_cast<std::size_t>(n) * n, sh, "gamma", 0, false);
  return make_base_metric(n, name, [E, n](const auto& x) { return sym_matrix(E, n, x); });
}

Space build_space(const SpaceSpec& spec0) {
  SpaceSpec spec = with_defaults(spec0);
  if (!(spec.m > 0.0)) throw SpecError("m", "mass must be positive");
  if (!(spec.c > 0.0)) throw SpecError("c", "light speed must be positive");
  BundleShape sh(spec.n, spec.k);
  int n = sh.n, k = sh.k;
  Space s;
  s.spec = spec;
  s.shape = sh;
  const std::string& kd = spec.kind;
  if (!spec.gamma.empty()) s.base = base_metric_from(spec.gamma, n, "gamma");

  if (kd == "electrodynamics" || kd == "riemann_prolong" || kd == "flat") {
    bool electro = kd == "electrodynamics";
    std::vector<Expr> B;
    if (electro) B = compile_all(spec.b, n, sh, "b", 0, false);
    double mc = electro ? spec.m * spec.c : 1.0, em = electro ? spec.e / spec.m : 0.0;
    BaseMetric base = *s.base;
    s.H = make_field(sh, kd, [base, B, mc, em, sh](const auto& u) { return quadratic_h(base, B, mc, em, sh, u); });
    s.metric = hamilton_metric(*s.H);
    s.N = electro ? electro_connection(base, B, spec.e / spec.c, sh) : prolong_riemann(base, sh);
    s.lagrangian = [base, B, mc, em, sh](const Anchor& A) { return quadratic_lagrangian(base, B, mc, em, sh, A); };
    s.g_closed = [base, mc, n](const JetPoint& u) {
      std::vector<double> x(u.u.begin(), u.u.begin() + n);
      Mat gi = inverse(base(x));
      for (auto& v : gi.a) v /= mc;
      return gi;
    };
    s.hj_capable = true;
    s.title = electro ? "electrodynamics: H = (1/mc) gamma^ij (p - (e/m) b)_i (p - (e/m) b)_j"
                      : kd == "flat" ? "flat: H = |p|^2" : "Riemannian prolongation: H = gamma^ij p_i p_j";
  } else if (kd == "cartan_quadratic") {
    std::vector<Expr> A = compile_all(spec.a, static_cast<std::size_t>(n) * n, sh, "a", k - 1, false);
    auto quad = [A, sh](const auto& u) {
      using S = std::decay_t<decltype(u[0])>;
      int n = sh.n;
      SMat<S> a = sym_matrix(A, n, u);
      S q = zero_like(u[0]);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q = q + a(i, j) * u[sh.p(i)] * u[sh.p(j)];
      return q;
    };
    s.H = make_field(sh, "K^2", quad);
    s.K = make_field(sh, "K", [quad](const auto& u) { return checked_sqrt(quad(u)); });
    s.metric = hamilton_metric(*s.H);
    s.N = prolong_riemann(*s.base, sh);
    s.g_closed = [A, n](const JetPoint& u) { return sym_matrix(A, n, u.u); };
    s.hj_capable = std::all_of(A.begin(), A.end(), y1_only);
    s.title = "Cartan space: K = sqrt(a^ij(x, y) p_i p_j), a 0-homogeneous";
  } else if (kd == "optics") {
    Expr nx = spec.index == "inf" ? nullptr : compile(spec.index, sh, "index");
    if (nx) {
      // a constant index can be rejected up front; a varying one is checked where it is evaluated
      std::vector<const Node*> vs;
      collect_vars(nx, vs);
      double v0 = vs.empty() ? eval(nx, std::vector<double>(sh.dim(), 0.0)) : 2.0;
      if (!(v0 > 1.0)) throw SpecError("index", "refractive index " + std::to_string(v0) + " violates n > 1");
    }
    Expr sg = spec.sigma.empty() ? nullptr : compile(spec.sigma, sh, "sigma");
    if (sg) check_vars(sg, 1, false, "sigma");
    BaseMetric base = *s.base;
    // conformal factor exp(-2 sigma) on gamma^ij and 1 - 1/n^2, at the source point
    auto factors = [nx, sg](const auto& u) {
      using S = std::decay_t<decltype(u[0])>;
      using std::exp;
      S cf = sg ? exp(eval(sg, u) * -2.0) : constant_like(u[0], 1.0);
      S f = constant_like(u[0], 1.0);
      if (nx) {
        S nv = eval(nx, u);
        require_index_gt1(scalar_value(nv));
        f = 1.0 - 1.0 / (nv * nv);
      }
      return std::pair<S, S>(cf, f);
    };
    auto up = [base, sh, factors](const auto& u) {
      using S = std::decay_t<decltype(u[0])>;
      int n = sh.n;
      auto [cf, f] = factors(u);
      std::vector<S> x(u.begin(), u.begin() + n), p(u.begin() + sh.p(0), u.end());
      SMat<S> gi = inverse(base(x));
      for (auto& v : gi.a) v = v * cf;
      return optics_formula(gi, p, f);
    };
    s.metric = generalized_metric(sh, "optics", up);
    // g_ij = gamma_ij - (1/a)(1 - 1/n^2) p_i p_j, a = 1 + (1 - 1/n^2)|p|^2
    auto down_and_a = [base, sh, factors](const std::vector<double>& u) {
      int n = sh.n;
      auto [cf, f] = factors(u);
      std::vector<double> x(u.begin(), u.begin() + n);
      Mat g = base(x);
      for (auto& v : g.a) v /= cf;
      Mat gi = inverse(g);
      double p2 = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p2 += gi(i, j) * u[sh.p(i)] * u[sh.p(j)];
      double a = 1.0 + f * p2;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) -= f / a * u[sh.p(i)] * u[sh.p(j)];
      return std::tuple<Mat, double, double>(g, a, p2);
    };
    s.metric.down_closed = [down_and_a](const std::vector<double>& u) { return std::get<0>(down_and_a(u)); };
    s.energy = [down_and_a](const JetPoint& u) {
      auto [g, a, p2] = down_and_a(u.u);
      return a * p2;
    };
    s.optics_up = [sh, factors](const BaseMetric& bt, const std::vector<double>& ut, const std::vector<double>& u) {
      int n = sh.n;
      auto [cf, f] = factors(u);
      std::vector<double> xt(ut.begin(), ut.begin() + n), pt(ut.begin() + sh.p(0), ut.end());
      Mat gi = inverse(bt(xt));
      for (auto& v : gi.a) v *= cf;
      return optics_formula(gi, pt, f);
    };
    s.N = prolong_riemann(base, sh);
    s.title = "relativistic optics: g^ij = gamma^ij + (1 - 1/n^2) P^i P^j (generalized Hamilton space)";
  } else {
    Expr h = compile(spec.hamiltonian, sh, "hamiltonian");
    s.H = field_from_expr(h, sh);
    s.H->name = "H";
    s.metric = hamilton_metric(*s.H);
    s.N = s.base ? prolong_riemann(*s.base, sh) : zero_connection(sh);
    s.hj_capable = y1_only(h);
    s.title = "custom Hamiltonian: H = " + spec.hamiltonian;
  }
  s.anchor = s.base ? prolonged_anchor(*s.base, sh) : zero_anchor(sh);
  return s;
}

}  // namespace hk
