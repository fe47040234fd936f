#pragma once
// The canonical metrical N-linear connection: generalized Christoffel
// symbols, covariant derivatives, deflection tensors, curvature.
//
// Coefficient arrays are flat, entry (i*n + j)*n + h:
//   H[i,j,h]     = H^i_{jh}
//   Cv[a-1][...] = C_(a)^i_{jh}
//   Cw[i,j,h]    = C_i^{jh}

#include <functional>
#include <vector>

#include "hk/metric.hpp"
#include "hk/nonlinear.hpp"

namespace hk {

struct NLinCoeffs {
  ConnCoeffs conn;
  TMat gUp, gDown;
  std::vector<Taylor> H, Cw;
  std::vector<std::vector<Taylor>> Cv;
  // omega[A](i, m): connection 1-form matrix along frame direction A
  std::vector<TMat> omega() const;
};

struct NLinearConnection {
  BundleShape shape;
  MetricModel metric;
  NonlinearConnection N;
  // expansion order for which coefficients come out with at least one valid derivative
  int curvature_order() const;
};

NLinearConnection canonical_metrical(const MetricModel& g, const NonlinearConnection& N);
NLinCoeffs canonical_coeffs(const NLinearConnection& D, const Expansion& ex);

struct NLinValues {
  DTensor H, Cw;
  std::vector<DTensor> Cv;
};
NLinValues coefficient_values(const NLinearConnection& D, const JetPoint& u);

enum class Direction { H, V, W };

// A d-tensor field: slot metadata plus component evaluator along an expansion.
struct TField {
  int n = 0;
  std::vector<Slot> slots;
  std::function<std::vector<Taylor>(const Expansion&)> comps;
};

TField metric_up_field(const MetricModel& g);
TField metric_down_field(const MetricModel& g);
TField momentum_field(const BundleShape& sh);  // p_i
TField liouville_field(const NonlinearConnection& N, int a);  // z^(a)i
TField kronecker_field(const BundleShape& sh);
TField tensor_product(const TField& a, const TField& b);

// Covariant derivative in direction H, V_a (a = 1..k-1) or W_k. The result
// has one extra slot (down for H/V, up for W) holding the derivative index.
DTensor covariant_derivative(const NLinearConnection& D, const TField& T, Direction dir, int a, const JetPoint& u);

struct Deflections {
  DTensor Delta;            // p_{i|j}
  std::vector<DTensor> dv;  // p_i |(a)_j
  DTensor dw;               // p_i |^j
};
// closed forms: Delta_ij = N_ji - p_h H^h_ij, dv = -p_h C_(a)^h_ij, dw = delta - p_h C_i^{hj}
Deflections deflection_tensors(const NLinearConnection& D, const JetPoint& u);

// Curvature operator on adapted frame pairs:
//   Omega(A,B) = X_A w_B - X_B w_A + [w_A, w_B] - c_AB^C w_C
struct CurvaturePack {
  BundleShape shape;
  std::vector<double> omega;  // ((A*D + B)*n + i)*n + m
  Mat gUp;

  double at(int A, int B, int i, int m) const;
  // R_m^i_{jh}
  double R(int m, int i, int j, int h) const;
  // P_(a)m^i_{jh}
  double P(int a, int m, int i, int j, int h) const;
  // P_m^i_j^h
  double Pw(int m, int i, int j, int h) const;
  // S_(ab)m^i_{jh}
  double S(int a, int b, int m, int i, int j, int h) const;
  // S_(a)m^i_j^h
  double Sv(int a, int m, int i, int j, int h) const;
  // S_m^{ijh}
  double Sfull(int m, int i, int j, int h) const;

  // max over all frame pairs of |g^{sj}W_s^i + g^{is}W_s^j|
  double metric_antisymmetry_defect() const;
  // max |Omega(A,B) + Omega(B,A)|
  double pair_antisymmetry_defect() const;
};

CurvaturePack curvature(const NLinearConnection& D, const JetPoint& u);

}  // namespace hk
