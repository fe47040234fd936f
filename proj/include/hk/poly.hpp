#pragma once
// A callable stored at the three scalar levels the engine evaluates at:
// plain doubles, Taylor expansions, and Taylor-of-Taylor (derivatives taken
// at a point that is itself expanded).

#include <functional>
#include <stdexcept>
#include <vector>

#include "hk/linalg.hpp"
#include "hk/taylor.hpp"

namespace hk {

template <class S>
using ScalarSig = S(const std::vector<S>&);
template <class S>
using VecSig = std::vector<S>(const std::vector<S>&);
template <class S>
using MatSig = SMat<S>(const std::vector<S>&);

template <template <class> class Sig>
struct Tri {
  std::function<Sig<double>> d;
  std::function<Sig<Taylor>> t;
  std::function<Sig<Taylor2>> t2;

  template <class S>
  const std::function<Sig<S>>& at() const {
    if constexpr (std::is_same_v<S, double>)
      return d;
    else if constexpr (std::is_same_v<S, Taylor>)
      return t;
    else
      return t2;
  }
  template <class S>
  auto operator()(const std::vector<S>& u) const {
    const auto& f = at<S>();
    if (!f) throw std::logic_error("callable not available at this scalar level");
    return f(u);
  }
  explicit operator bool() const { return static_cast<bool>(d); }
};

template <template <class> class Sig, class F>
Tri<Sig> make_tri(F f) {
  Tri<Sig> r;
  r.d = [f](const std::vector<double>& u) { return f(u); };
  r.t = [f](const std::vector<Taylor>& u) { return f(u); };
  r.t2 = [f](const std::vector<Taylor2>& u) { return f(u); };
  return r;
}

}  // namespace hk
