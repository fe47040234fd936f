#pragma once
// Lifted metric and almost contact structures at a point, as (k+1)n square
// matrices in the adapted frame (delta/delta x, delta/delta y(a), d/dp).

#include "hk/metric.hpp"
#include "hk/nlinear.hpp"
#include "hk/nonlinear.hpp"

namespace hk {

struct LiftedStructures {
  BundleShape shape;
  Mat G;      // N-lift: g_ij on H and every V_a, g^ij on W
  Mat F;      // F(delta_x i) = -g_ij d_p j, F(d_p i) = g^ij delta_x j, V -> 0
  Mat Fbb;    // metric-free: F(delta_x i) = -delta_y(k-1) i, F(delta_y(k-1) i) = delta_x i
  Mat theta;  // theta(X, Y) = G(F X, Y)
  Mat coframe;  // rows: dx, delta y(a), delta p in natural components
};

LiftedStructures lifted_structures(const MetricModel& g, const NonlinearConnection& N, const JetPoint& u);

// bilinear form given in the adapted frame, rewritten in natural coordinates
Mat to_natural(const Mat& adapted, const Mat& coframe);
// dp_i ^ dx^i as a natural-coordinate matrix: (x_i, p_i) = -1, (p_i, x_i) = 1
Mat canonical_two_form(const BundleShape& sh);

struct StructureChecks {
  double contact = 0.0;           // |F^3 + F|
  int rank_F = 0;
  double skew = 0.0;              // max |G(FX,Y) + G(X,FY)| over frame pairs
  double theta_antisym = 0.0;
  double theta_pattern = 0.0;     // |theta - delta p ^ dx| in the adapted frame
  double kernel = 0.0;            // |F on V blocks| + |rows of F in V blocks|
  double contact_free = 0.0;      // |Fbb^3 + Fbb|
  int rank_Fbb = 0;
  double theta_canonical = 0.0;   // |theta - dp ^ dx| in natural coordinates
  double nlow_asym = 0.0;         // max |N_ij - N_ji|
};

StructureChecks check_structures(const LiftedStructures& s, const ConnValues& c);

}  // namespace hk
