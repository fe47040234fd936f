#include "hk/jet.hpp"

#include <cmath>
#include <sstream>

namespace hk {

BundleShape::BundleShape(int n_, int k_) : n(n_), k(k_) {
  if (n < 1) throw ShapeError("dimension n must be at least 1");
  if (k < 2) throw ShapeError("order k must be at least 2 (k = 1 is the plain cotangent bundle)");
}

JetPoint::JetPoint(BundleShape s, std::vector<double> v) : shape(s), u(std::move(v)) {
  if (static_cast<int>(u.size()) != shape.dim()) throw ShapeError("point has wrong number of coordinates");
  for (double c : u)
    if (!std::isfinite(c)) throw DomainError("point has a non-finite coordinate");
}

bool JetPoint::off_null(double tol) const {
  double m = 0.0;
  for (int i = shape.n; i < shape.dim(); ++i) m = std::max(m, std::abs(u[i]));
  return m > tol;
}

std::string JetPoint::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (int i = 0; i < shape.dim(); ++i) {
    if (i) os << (i % shape.n == 0 ? " | " : ", ");
    os << u[i];
  }
  os << ")";
  return os.str();
}

JetPoint scale_fibers(const JetPoint& u, double a) { return JetPoint(u.shape, scale_fibers(u.shape, u.u, a)); }

JetPoint transform_point(const JetPoint& u, const Diffeomorphism& phi) {
  if (phi.n != u.shape.n) throw ShapeError("diffeomorphism dimension differs from the point");
  return JetPoint(u.shape, transform_point(u.shape, u.u, phi.forward));
}

Diffeomorphism identity_diffeo(int n) {
  Diffeomorphism d;
  d.n = n;
  d.forward = make_tri<VecSig>([](const auto& x) { return x; });
  d.inverse = d.forward;
  return d;
}

Diffeomorphism linear_diffeo(const Mat& A) { return quadratic_diffeo(A, std::vector<double>(A.r, 0.0)); }

Diffeomorphism quadratic_diffeo(const Mat& A, const std::vector<double>& c) {
  return to_diffeo(QuadraticMap{A, inverse(A), c});
}

Diffeomorphism to_diffeo(const QuadraticMap& q) {
  Diffeomorphism d;
  d.n = q.A.r;
  d.forward = make_tri<VecSig>([q](const auto& x) { return q.forward(x); });
  d.inverse = make_tri<VecSig>([q](const auto& x) { return q.inverse(x); });
  return d;
}

QuadraticMap random_quadratic_map(int n, std::uint64_t seed, double amp) {
  CounterRng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  Mat A = identity(n);
  for (auto& v : A.a) v += amp * rng.uniform();
  std::vector<double> c(n);
  for (auto& v : c) v = amp * rng.uniform();
  return QuadraticMap{A, inverse(A), c};
}

Diffeomorphism random_diffeo(int n, std::uint64_t seed, double amp) { return to_diffeo(random_quadratic_map(n, seed, amp)); }

DTensor::DTensor(int n_, std::vector<Slot> s) : n(n_), slots(std::move(s)) {
  std::size_t sz = 1;
  for (std::size_t i = 0; i < slots.size(); ++i) sz *= n;
  comp.assign(sz, 0.0);
}

std::size_t DTensor::offset(const std::vector<int>& idx) const {
  if (idx.size() != slots.size()) throw ShapeError("d-tensor index rank mismatch");
  std::size_t o = 0;
  for (int i : idx) o = o * n + i;
  return o;
}

double DTensor::max_abs() const {
  double m = 0.0;
  for (double v : comp) m = std::max(m, std::abs(v));
  return m;
}

DTensor from_matrix(const Mat& m, Slot a, Slot b) {
  DTensor t(m.r, {a, b});
  t.comp = m.a;
  return t;
}

Mat to_matrix(const DTensor& t) {
  if (t.rank() != 2) throw ShapeError("d-tensor is not rank 2");
  Mat m(t.n, t.n, 0.0);
  m.a = t.comp;
  return m;
}

double max_abs_diff(const DTensor& a, const DTensor& b) {
  if (a.n != b.n || a.rank() != b.rank()) throw ShapeError("d-tensor shapes differ");
  double m = 0.0;
  for (std::size_t i = 0; i < a.comp.size(); ++i) m = std::max(m, std::abs(a.comp[i] - b.comp[i]));
  return m;
}

DTensor transform_dtensor(const DTensor& T, const Diffeomorphism& phi, const JetPoint& u) {
  int n = T.n;
  if (phi.n != n || u.shape.n != n) throw ShapeError("d-tensor, chart and point dimensions differ");
  std::vector<double> x(u.u.begin(), u.u.begin() + n);
  Mat J = jacobian(phi.forward, x);  // dx~/dx
  Mat Ji = inverse(J);                // dx/dx~
  DTensor cur = T;
  // contract one slot at a time
  for (int s = 0; s < T.rank(); ++s) {
    DTensor nxt(n, T.slots);
    std::vector<int> idx(T.rank(), 0);
    for (std::size_t o = 0; o < cur.comp.size(); ++o) {
      std::size_t rem = o;
      for (int q = T.rank() - 1; q >= 0; --q) {
        idx[q] = static_cast<int>(rem % n);
        rem /= n;
      }
      double acc = 0.0;
      std::vector<int> src = idx;
      for (int m = 0; m < n; ++m) {
        src[s] = m;
        double w = T.slots[s].var == Variance::Up ? J(idx[s], m) : Ji(m, idx[s]);
        acc += w * cur.at(src);
      }
      nxt.comp[o] = acc;
    }
    cur = std::move(nxt);
  }
  return cur;
}

double CounterRng::uniform() {
  // splitmix64 of (seed, counter)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (++counter);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

JetPoint random_point(const BundleShape& sh, CounterRng& rng, double scale) {
  std::vector<double> u(sh.dim());
  for (auto& v : u) v = scale * rng.uniform();
  return JetPoint(sh, u);
}

}  // namespace hk
