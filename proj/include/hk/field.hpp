#pragma once
// Scalar fields on T*^k M with a Taylor derivative oracle.

#include <optional>
#include <string>
#include <vector>

#include "hk/expr.hpp"
#include "hk/jet.hpp"
#include "hk/poly.hpp"

namespace hk {

constexpr int kDefaultOrder = 4;

struct ScalarField {
  BundleShape shape;
  std::string name;
  Tri<ScalarSig> f;

  template <class S>
  S operator()(const std::vector<S>& u) const {
    try {
      return f(u);
    } catch (const DomainError& e) {
      std::vector<double> at;
      for (const auto& v : u) at.push_back(scalar_value(v));
      throw DomainError(name + ": " + e.what() + " at " + JetPoint(shape, at).str());
    }
  }
  double operator()(const JetPoint& u) const { return (*this)(u.u); }
};

template <class F>
ScalarField make_field(const BundleShape& sh, std::string name, F fn) {
  return ScalarField{sh, std::move(name), make_tri<ScalarSig>(fn)};
}

ScalarField field_from_expr(const Expr& e, const BundleShape& sh, Side side = Side::Cotangent);
ScalarField field_from_text(const std::string& src, const BundleShape& sh, Side side = Side::Cotangent);

// A point seeded as independent Taylor variables: X_i = u_i + dX_i.
struct Expansion {
  BundleShape shape;
  std::vector<double> u;
  const TaylorSpace* sp = nullptr;
  std::vector<Taylor> X;

  Expansion() = default;
  Expansion(const BundleShape& sh, const std::vector<double>& at, int order);
  Taylor cst(double v) const { return Taylor::constant(sp, v); }
  Taylor zero() const { return cst(0.0); }
};

// gradient (first partials) of f at u
std::vector<double> gradient(const ScalarField& f, const JetPoint& u);
// full Taylor expansion of f at u to the given order
Taylor expand(const ScalarField& f, const JetPoint& u, int order = kDefaultOrder);

enum class EulerKind { Combined, Liouville, Momentum };

// Combined: sum_a a y(a).dH/dy(a) + k p.dH/dp
// Liouville: the y-part only (Gamma^{k-1}); Momentum: p.dH/dp only (C*)
double euler_operator(const ScalarField& H, const JetPoint& u, EulerKind kind = EulerKind::Combined);

struct HomogeneityVerdict {
  bool indeterminate = false;  // H(u) = 0
  bool homogeneous = false;
  double r = 0.0;
  double worst_rel = 0.0;  // largest relative scaling defect over the test factors
};

HomogeneityVerdict homogeneity_degree(const ScalarField& H, const JetPoint& u, EulerKind kind = EulerKind::Combined);

}  // namespace hk
