#pragma once
// Fundamental tensor g^{ij}, its inverse, and the C-tensors.

#include <functional>
#include <string>

#include "hk/field.hpp"
#include "hk/linalg.hpp"

namespace hk {

struct MetricPair {
  Mat gUp, gDown;
  double cond = 0.0;
  int npos = 0, nneg = 0;
};

// Regularity gate: smallest singular value >= 1e-10 * largest, cond < condMax.
MetricPair metric_pair(const Mat& gUp, const JetPoint& u);

// g^{ij} = 1/2 d2H/dp_i dp_j
MetricPair fundamental_tensor(const ScalarField& H, const JetPoint& u);

// A g^{ij} field, either the momentum Hessian of a Hamiltonian or given
// directly (generalized Hamilton spaces).
struct MetricModel {
  BundleShape shape;
  std::string name;
  bool hamiltonian = false;
  std::function<Mat(const std::vector<double>&)> up;
  std::function<TMat(const Expansion&)> up_t;  // degree drops by 2 for a Hamiltonian
  std::function<Mat(const std::vector<double>&)> down_closed;  // optional closed-form g_{ij}
};

MetricModel hamilton_metric(const ScalarField& H);

template <class F>
MetricModel generalized_metric(const BundleShape& sh, std::string name, F gup) {
  MetricModel m;
  m.shape = sh;
  m.name = std::move(name);
  m.up = [gup](const std::vector<double>& u) { return gup(u); };
  m.up_t = [gup](const Expansion& ex) { return gup(ex.X); };
  return m;
}

MetricPair metric_at(const MetricModel& g, const JetPoint& u);

// C^{ijh} = -1/4 d3H/dp_i dp_j dp_h
DTensor c_up_tensor(const ScalarField& H, const JetPoint& u);
// C_i^{jh} = -1/2 g_is (d^j g^{sh} + d^h g^{js} - d^s g^{jh})
DTensor c_mixed_tensor(const MetricModel& g, const JetPoint& u);

// Total-symmetry probe of C^{ijh} = -1/2 d^h g^{ij}; a generalized metric
// reduces to a Hamilton space only if this vanishes.
struct ReducibilityProbe {
  double defect = 0.0;  // max |C^{ijh} - C^{ihj}|
  double scale = 0.0;   // max |C^{ijh}|
  bool reducible = true;
};
ReducibilityProbe reducibility_probe(const MetricModel& g, const JetPoint& u, double tol = 1e-9);

}  // namespace hk
