#include "hk/structures.hpp"

#include <algorithm>

namespace hk {

LiftedStructures lifted_structures(const MetricModel& g, const NonlinearConnection& N, const JetPoint& u) {
  const BundleShape& sh = u.shape;
  int n = sh.n, k = sh.k, D = sh.dim();
  MetricPair mp = metric_at(g, u);
  // the inverse is symmetric only to rounding; the lift is symmetric by definition
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      mp.gDown(i, j) = mp.gDown(j, i) = 0.5 * (mp.gDown(i, j) + mp.gDown(j, i));
      mp.gUp(i, j) = mp.gUp(j, i) = 0.5 * (mp.gUp(i, j) + mp.gUp(j, i));
    }
  LiftedStructures s;
  s.shape = sh;
  s.G = Mat(D, D, 0.0);
  s.F = Mat(D, D, 0.0);
  s.Fbb = Mat(D, D, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < k; ++a) s.G(a * n + i, a * n + j) = mp.gDown(i, j);
      s.G(sh.p(i), sh.p(j)) = mp.gUp(i, j);
      // column = image of the frame vector
      s.F(sh.p(j), sh.x(i)) = -mp.gDown(i, j);
      s.F(sh.x(j), sh.p(i)) = mp.gUp(i, j);
    }
  for (int i = 0; i < n; ++i) {
    s.Fbb(sh.y(k - 1, i), sh.x(i)) = -1.0;
    s.Fbb(sh.x(i), sh.y(k - 1, i)) = 1.0;
  }
  s.theta = matmul(transpose(s.F), s.G);
  s.coframe = coframe_matrix(sh, connection_values(N, u));
  return s;
}

Mat to_natural(const Mat& adapted, const Mat& coframe) {
  return matmul(transpose(coframe), matmul(adapted, coframe));
}

Mat canonical_two_form(const BundleShape& sh) {
  Mat m(sh.dim(), sh.dim(), 0.0);
  for (int i = 0; i < sh.n; ++i) {
    m(sh.x(i), sh.p(i)) = -1.0;
    m(sh.p(i), sh.x(i)) = 1.0;
  }
  return m;
}

StructureChecks check_structures(const LiftedStructures& s, const ConnValues& c) {
  const BundleShape& sh = s.shape;
  int n = sh.n, D = sh.dim();
  StructureChecks r;
  Mat F3 = matmul(s.F, matmul(s.F, s.F));
  r.contact = max_abs(madd(F3, s.F));
  r.rank_F = numeric_rank(s.F);
  Mat B3 = matmul(s.Fbb, matmul(s.Fbb, s.Fbb));
  r.contact_free = max_abs(madd(B3, s.Fbb));
  r.rank_Fbb = numeric_rank(s.Fbb);
  // G(F e_A, e_B) + G(e_A, F e_B) = (F^T G + G F)_AB
  r.skew = max_abs(madd(matmul(transpose(s.F), s.G), matmul(s.G, s.F)));
  r.theta_antisym = max_abs(madd(s.theta, transpose(s.theta)));
  r.theta_pattern = max_abs_diff(s.theta, canonical_two_form(sh));
  for (int A = n; A < sh.p(0); ++A)
    for (int B = 0; B < D; ++B) r.kernel = std::max({r.kernel, std::abs(s.F(B, A)), std::abs(s.F(A, B))});
  r.theta_canonical = max_abs_diff(to_natural(s.theta, s.coframe), canonical_two_form(sh));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.nlow_asym = std::max(r.nlow_asym, std::abs(c.Nlow(i, j) - c.Nlow(j, i)));
  return r;
}

}  // namespace hk
