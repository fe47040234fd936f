#pragma once
// Truncated multivariate Taylor polynomials.
//
// A TaylorT<C> stores coefficients of monomials in a fixed TaylorSpace,
// graded by total degree. `deg` is the degree up to which the coefficients
// are trustworthy; products truncate at the smaller of the two, derivatives
// lower it by one. Coefficients may themselves be Taylor polynomials
// (TaylorT<Taylor>), which is how derivatives of a field are taken at a point
// that is itself a Taylor expansion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace hk {

class TaylorSpace {
 public:
  struct Triple {
    std::uint32_t a, b, c;
  };
  struct DerivEntry {
    std::uint32_t src, dst;
    double f;
  };

  // Cached, immutable; safe to share across threads.
  static const TaylorSpace* get(int nvars, int order);

  int nvars() const { return nv_; }
  int order() const { return order_; }
  // number of monomials of total degree <= d
  std::size_t count(int d) const {
    if (d < 0) return 0;
    if (d > order_) d = order_;
    return offs_[d + 1];
  }
  int degree(std::size_t m) const { return degs_[m]; }
  int exponent(std::size_t m, int v) const { return exps_[m * nv_ + v]; }
  std::size_t index(const std::vector<int>& e) const;
  std::size_t var_index(int v) const { return 1 + static_cast<std::size_t>(v); }

  const std::vector<Triple>& bucket(int da, int db) const { return buckets_[da * (order_ + 1) + db]; }
  // derivative table for variable v, entries ordered by source degree
  const std::vector<DerivEntry>& deriv(int v) const { return deriv_[v]; }
  std::size_t deriv_count(int v, int srcdeg) const {
    if (srcdeg < 1) return 0;
    if (srcdeg > order_) srcdeg = order_;
    return deriv_off_[v][srcdeg];
  }
  // factorial weight prod(e_v!) of monomial m
  double factorial_weight(std::size_t m) const { return fw_[m]; }

 private:
  TaylorSpace(int nvars, int order);
  int nv_, order_;
  std::vector<std::size_t> offs_;
  std::vector<int> degs_;
  std::vector<std::uint8_t> exps_;
  std::vector<double> fw_;
  std::vector<std::vector<Triple>> buckets_;
  std::vector<std::vector<DerivEntry>> deriv_;
  std::vector<std::vector<std::size_t>> deriv_off_;
  std::vector<std::pair<std::string, std::size_t>> lookup_;  // sorted
};

template <class C>
class TaylorT;

using Taylor = TaylorT<double>;
using Taylor2 = TaylorT<Taylor>;

// scalar helpers that dispatch on double / TaylorT
inline double scalar_value(double v) { return v; }
inline double zero_like(double) { return 0.0; }
inline double constant_like(double, double v) { return v; }

template <class C>
double scalar_value(const TaylorT<C>& t);
template <class C>
TaylorT<C> zero_like(const TaylorT<C>& r);
template <class C>
TaylorT<C> constant_like(const TaylorT<C>& r, double v);

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class C>
class TaylorT {
 public:
  using coeff_type = C;

  const TaylorSpace* sp = nullptr;
  int deg = -1;  // validity degree
  int sd = 0;    // stored degree: c.size() == sp->count(sd)
  std::vector<C> c;

  TaylorT() = default;

  static TaylorT constant(const TaylorSpace* s, C v) {
    TaylorT t;
    t.sp = s;
    t.deg = s->order();
    t.sd = 0;
    t.c.push_back(std::move(v));
    return t;
  }
  // coordinate variable v with base value `at`
  static TaylorT variable(const TaylorSpace* s, int v, C at) {
    TaylorT t;
    t.sp = s;
    t.deg = s->order();
    if (s->order() == 0) {
      t.sd = 0;
      t.c.push_back(std::move(at));
      return t;
    }
    t.sd = 1;
    C z = zero_like(at);
    t.c.assign(s->count(1), z);
    t.c[s->var_index(v)] = constant_like(at, 1.0);
    t.c[0] = std::move(at);
    return t;
  }

  const C& value() const {
    if (deg < 0) throw std::logic_error("Taylor value requested beyond valid degree");
    return c[0];
  }
  C coef(std::size_t m) const {
    if (m < c.size()) return c[m];
    return zero_like(c[0]);
  }
  // mixed partial derivative at the base point; vars may repeat
  C partial(const std::vector<int>& vars) const {
    std::vector<int> e(sp->nvars(), 0);
    for (int v : vars) e[v]++;
    if (static_cast<int>(vars.size()) > deg)
      throw std::logic_error("partial derivative order exceeds Taylor validity degree");
    std::size_t m = sp->index(e);
    return coef(m) * sp->factorial_weight(m);
  }

  TaylorT& operator+=(const TaylorT& o) { return *this = *this + o; }
  TaylorT& operator-=(const TaylorT& o) { return *this = *this - o; }
  TaylorT& operator*=(const TaylorT& o) { return *this = *this * o; }
  TaylorT& operator/=(const TaylorT& o) { return *this = *this / o; }
  TaylorT& operator*=(double s) {
    for (auto& x : c) x = x * s;
    return *this;
  }
  TaylorT& operator+=(double s) {
    c[0] = c[0] + s;
    return *this;
  }

  friend TaylorT operator+(const TaylorT& a, const TaylorT& b) {
    check_same(a, b);
    TaylorT r;
    r.sp = a.sp;
    r.deg = std::min(a.deg, b.deg);
    r.sd = std::max(0, std::min(std::max(a.sd, b.sd), r.deg));
    std::size_t n = r.sp->count(r.sd);
    r.c.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      bool ha = i < a.c.size(), hb = i < b.c.size();
      if (ha && hb)
        r.c.push_back(a.c[i] + b.c[i]);
      else if (ha)
        r.c.push_back(a.c[i]);
      else
        r.c.push_back(b.c[i]);
    }
    return r;
  }
  friend TaylorT operator-(const TaylorT& a) {
    TaylorT r = a;
    for (auto& x : r.c) x = -x;
    return r;
  }
  friend TaylorT operator-(const TaylorT& a, const TaylorT& b) { return a + (-b); }

  friend TaylorT operator*(const TaylorT& a, const TaylorT& b) {
    check_same(a, b);
    TaylorT r;
    r.sp = a.sp;
    r.deg = std::min(a.deg, b.deg);
    r.sd = std::max(0, std::min(r.deg, a.sd + b.sd));
    r.c.assign(r.sp->count(r.sd), zero_like(a.c[0]));
    for (int da = 0; da <= a.sd; ++da)
      for (int db = 0; db <= b.sd && da + db <= r.sd; ++db)
        for (const auto& t : r.sp->bucket(da, db)) r.c[t.c] += a.c[t.a] * b.c[t.b];
    return r;
  }
  friend TaylorT operator/(const TaylorT& a, const TaylorT& b) { return a * reciprocal(b); }

  friend TaylorT operator+(const TaylorT& a, double s) {
    TaylorT r = a;
    r.c[0] = r.c[0] + s;
    return r;
  }
  friend TaylorT operator+(double s, const TaylorT& a) { return a + s; }
  friend TaylorT operator-(const TaylorT& a, double s) { return a + (-s); }
  friend TaylorT operator-(double s, const TaylorT& a) { return (-a) + s; }
  friend TaylorT operator*(const TaylorT& a, double s) {
    TaylorT r = a;
    for (auto& x : r.c) x = x * s;
    return r;
  }
  friend TaylorT operator*(double s, const TaylorT& a) { return a * s; }
  friend TaylorT operator/(const TaylorT& a, double s) { return a * (1.0 / s); }
  friend TaylorT operator/(double s, const TaylorT& a) { return reciprocal(a) * s; }

 private:
  static void check_same(const TaylorT& a, const TaylorT& b) {
    if (a.sp != b.sp) throw std::logic_error("Taylor operands live in different spaces");
  }
};

// mixed arithmetic with the coefficient type (nested levels only)
template <class C>
  requires(!std::is_same_v<C, double>)
TaylorT<C> operator*(const TaylorT<C>& a, const C& s) {
  TaylorT<C> r = a;
  for (auto& x : r.c) x = x * s;
  return r;
}
template <class C>
  requires(!std::is_same_v<C, double>)
TaylorT<C> operator*(const C& s, const TaylorT<C>& a) {
  return a * s;
}
template <class C>
  requires(!std::is_same_v<C, double>)
TaylorT<C> operator+(const TaylorT<C>& a, const C& s) {
  TaylorT<C> r = a;
  r.c[0] = r.c[0] + s;
  return r;
}
template <class C>
  requires(!std::is_same_v<C, double>)
TaylorT<C> operator+(const C& s, const TaylorT<C>& a) {
  return a + s;
}
template <class C>
  requires(!std::is_same_v<C, double>)
TaylorT<C> operator-(const TaylorT<C>& a, const C& s) {
  return a + (-s);
}
template <class C>
  requires(!std::is_same_v<C, double>)
TaylorT<C> operator-(const C& s, const TaylorT<C>& a) {
  return (-a) + s;
}

template <class C>
double scalar_value(const TaylorT<C>& t) {
  return scalar_value(t.c[0]);
}
template <class C>
TaylorT<C> zero_like(const TaylorT<C>& r) {
  return TaylorT<C>::constant(r.sp, zero_like(r.c[0]));
}
template <class C>
TaylorT<C> constant_like(const TaylorT<C>& r, double v) {
  return TaylorT<C>::constant(r.sp, constant_like(r.c[0], v));
}

// f(a) from the normalized derivative sequence f[j] = f^(j)(a0)/j!
template <class C>
TaylorT<C> compose(const TaylorT<C>& a, const std::vector<C>& f) {
  if (a.sd == 0 || a.deg <= 0) {
    TaylorT<C> r = TaylorT<C>::constant(a.sp, f[0]);
    r.deg = a.deg;
    return r;
  }
  TaylorT<C> rem = a;
  rem.c[0] = zero_like(a.c[0]);
  int m = std::min<int>(a.deg, static_cast<int>(f.size()) - 1);
  TaylorT<C> res = TaylorT<C>::constant(a.sp, f[m]);
  res.deg = a.deg;
  for (int j = m - 1; j >= 0; --j) {
    res = res * rem;
    res.c[0] = res.c[0] + f[j];
  }
  return res;
}

namespace detail {
inline void domain_check(bool ok, const char* what, double v) {
  if (!ok) throw DomainError(std::string(what) + " outside its domain at value " + std::to_string(v));
}
}  // namespace detail

template <class C>
TaylorT<C> exp(const TaylorT<C>& a) {
  using std::exp;
  C e0 = exp(a.c[0]);
  std::vector<C> f;
  double fact = 1.0;
  for (int j = 0; j <= std::max(a.deg, 0); ++j) {
    if (j > 0) fact *= j;
    f.push_back(e0 * (1.0 / fact));
  }
  return compose(a, f);
}

template <class C>
TaylorT<C> log(const TaylorT<C>& a) {
  using std::log;
  double v = scalar_value(a);
  detail::domain_check(v > 0.0, "log", v);
  C inv = 1.0 / a.c[0];
  std::vector<C> f{log(a.c[0])};
  C pw = inv;
  for (int j = 1; j <= std::max(a.deg, 0); ++j) {
    f.push_back(pw * ((j % 2 ? 1.0 : -1.0) / j));
    pw = pw * inv;
  }
  return compose(a, f);
}

inline double pow_real_scalar(double a, double q) {
  if (q == -1.0) return 1.0 / a;
  return std::pow(a, q);
}
template <class C>
TaylorT<C> pow_real(const TaylorT<C>& a, double q);
template <class C>
TaylorT<C> pow_real_scalar(const TaylorT<C>& a, double q) {
  return pow_real(a, q);
}

// a^q for real q, a > 0 (or any a when q is a nonnegative integer handled elsewhere)
template <class C>
TaylorT<C> pow_real(const TaylorT<C>& a, double q) {
  double v = scalar_value(a);
  detail::domain_check(v > 0.0 || (v != 0.0 && q == std::round(q)), "power", v);
  using std::pow;
  C inv = 1.0 / a.c[0];
  C base = pow_real_scalar(a.c[0], q);
  std::vector<C> f{base};
  double binom = 1.0;
  C pw = inv;
  for (int j = 1; j <= std::max(a.deg, 0); ++j) {
    binom *= (q - (j - 1)) / j;
    f.push_back(base * pw * binom);
    pw = pw * inv;
  }
  return compose(a, f);
}


template <class C>
TaylorT<C> reciprocal(const TaylorT<C>& a) {
  double v = scalar_value(a);
  detail::domain_check(v != 0.0, "division", v);
  C inv = 1.0 / a.c[0];
  std::vector<C> f{inv};
  C pw = inv;
  for (int j = 1; j <= std::max(a.deg, 0); ++j) {
    pw = pw * inv;
    f.push_back(pw * (j % 2 ? -1.0 : 1.0));
  }
  return compose(a, f);
}

template <class C>
TaylorT<C> sqrt(const TaylorT<C>& a) {
  double v = scalar_value(a);
  detail::domain_check(v > 0.0 || (v == 0.0 && a.sd == 0), "sqrt", v);
  if (v == 0.0) return a;
  return pow_real(a, 0.5);
}

template <class C>
TaylorT<C> sin(const TaylorT<C>& a) {
  using std::cos;
  using std::sin;
  C s = sin(a.c[0]), co = cos(a.c[0]);
  std::vector<C> f;
  double fact = 1.0;
  for (int j = 0; j <= std::max(a.deg, 0); ++j) {
    if (j > 0) fact *= j;
    const C& b = (j % 2 == 0) ? s : co;
    double sg = (j % 4 < 2) ? 1.0 : -1.0;
    f.push_back(b * (sg / fact));
  }
  return compose(a, f);
}

template <class C>
TaylorT<C> cos(const TaylorT<C>& a) {
  using std::cos;
  using std::sin;
  C s = sin(a.c[0]), co = cos(a.c[0]);
  std::vector<C> f;
  double fact = 1.0;
  for (int j = 0; j <= std::max(a.deg, 0); ++j) {
    if (j > 0) fact *= j;
    // d^j cos = cos, -sin, -cos, sin
    const C& b = (j % 2 == 0) ? co : s;
    double sg = (j % 4 == 0 || j % 4 == 3) ? 1.0 : -1.0;
    f.push_back(b * (sg / fact));
  }
  return compose(a, f);
}

template <class C>
TaylorT<C> ipow(const TaylorT<C>& a, int e) {
  if (e < 0) return ipow(reciprocal(a), -e);
  TaylorT<C> r = constant_like(a, 1.0);
  TaylorT<C> b = a;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}
inline double ipow(double a, int e) {
  if (e < 0) {
    if (a == 0.0) throw DomainError("negative power of zero");
    return 1.0 / ipow(a, -e);
  }
  double r = 1.0;
  while (e) {
    if (e & 1) r *= a;
    e >>= 1;
    if (e) a *= a;
  }
  return r;
}

// Checked scalar functions with the same names as the Taylor versions.
inline double checked_sqrt(double v) {
  detail::domain_check(v >= 0.0, "sqrt", v);
  return std::sqrt(v);
}
inline double checked_log(double v) {
  detail::domain_check(v > 0.0, "log", v);
  return std::log(v);
}
inline double checked_div(double a, double b) {
  detail::domain_check(b != 0.0, "division", b);
  return a / b;
}
template <class C>
TaylorT<C> checked_sqrt(const TaylorT<C>& a) {
  return sqrt(a);
}
template <class C>
TaylorT<C> checked_log(const TaylorT<C>& a) {
  return log(a);
}
template <class C>
TaylorT<C> checked_div(const TaylorT<C>& a, const TaylorT<C>& b) {
  return a / b;
}

// d/dx_v
template <class C>
TaylorT<C> d(const TaylorT<C>& a, int v) {
  TaylorT<C> r;
  r.sp = a.sp;
  r.deg = a.deg - 1;
  if (a.sd == 0) {
    r.sd = 0;
    r.c.push_back(zero_like(a.c[0]));
    return r;
  }
  r.sd = a.sd - 1;
  r.c.assign(r.sp->count(r.sd), zero_like(a.c[0]));
  const auto& tab = a.sp->deriv(v);
  std::size_t n = a.sp->deriv_count(v, a.sd);
  for (std::size_t i = 0; i < n; ++i) r.c[tab[i].dst] += a.c[tab[i].src] * tab[i].f;
  return r;
}

// drop validity to degree dd (cheap truncation)
template <class C>
TaylorT<C> truncate(const TaylorT<C>& a, int dd) {
  TaylorT<C> r = a;
  r.deg = std::min(a.deg, dd);
  if (r.sd > std::max(dd, 0)) {
    r.sd = std::max(dd, 0);
    r.c.resize(r.sp->count(r.sd));
  }
  return r;
}

// Keep only monomials in the first `keep` variables and re-express in the
// smaller space `to` (which must have nvars == keep).
template <class C>
TaylorT<C> restrict_leading(const TaylorT<C>& a, const TaylorSpace* to) {
  int keep = to->nvars();
  TaylorT<C> r;
  r.sp = to;
  r.deg = std::min(a.deg, to->order());
  r.sd = std::min(a.sd, to->order());
  r.c.assign(to->count(r.sd), zero_like(a.c[0]));
  std::vector<int> e(keep);
  for (std::size_t m = 0; m < a.c.size(); ++m) {
    if (a.sp->degree(m) > r.sd) break;
    bool ok = true;
    for (int v = keep; v < a.sp->nvars(); ++v)
      if (a.sp->exponent(m, v)) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (int v = 0; v < keep; ++v) e[v] = a.sp->exponent(m, v);
    r.c[to->index(e)] = a.c[m];
  }
  return r;
}

// Embed a polynomial over the first nvars(from) variables of `to`.
template <class C>
TaylorT<C> embed_leading(const TaylorT<C>& a, const TaylorSpace* to) {
  TaylorT<C> r;
  r.sp = to;
  r.deg = std::min(a.deg, to->order());
  r.sd = std::min(a.sd, to->order());
  r.c.assign(to->count(r.sd), zero_like(a.c[0]));
  std::vector<int> e(to->nvars(), 0);
  for (std::size_t m = 0; m < a.c.size(); ++m) {
    if (a.sp->degree(m) > r.sd) break;
    for (int v = 0; v < a.sp->nvars(); ++v) e[v] = a.sp->exponent(m, v);
    r.c[to->index(e)] = a.c[m];
  }
  return r;
}

// Inner scalar of a nested value (drops the outer expansion).
inline double base_value(double v) { return v; }
template <class C>
C base_value(const TaylorT<C>& t) {
  return t.c[0];
}

}  // namespace hk
