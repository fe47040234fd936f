#pragma once
// Built-in example spaces and the key-value configuration file.

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hk/dynamics.hpp"
#include "hk/legendre.hpp"
#include "hk/metric.hpp"
#include "hk/nlinear.hpp"
#include "hk/nonlinear.hpp"

namespace hk {

// Parameters of a catalog space. Empty expression lists take the kind's
// defaults (see README). gamma is gamma_ij row-major, symmetrized on use.
struct SpaceSpec {
  std::string kind = "electrodynamics";
  int n = 2, k = 3;
  double m = 1.0, c = 1.0, e = 1.0;
  std::vector<std::string> gamma;  // x only
  std::vector<std::string> b;      // x only
  std::vector<std::string> a;      // cartan a^ij, x and y, 0-homogeneous
  std::string index;               // optics n(x, y, p) > 1, or "inf"
  std::string sigma;               // optics: gamma_ij -> exp(2 sigma) gamma_ij, sigma(x, y1)
  std::string hamiltonian;         // custom_expr
};

const std::vector<std::string>& catalog_kinds();
// kind defaults resolved against n and k
SpaceSpec with_defaults(SpaceSpec s);

struct Space {
  SpaceSpec spec;
  BundleShape shape;
  std::string title;
  std::optional<ScalarField> H, K;
  MetricModel metric;
  NonlinearConnection N;
  std::optional<BaseMetric> base;
  Anchor anchor;
  // closed-form Lagrangian for a given anchor (quadratic kinds only)
  std::function<LagrangeSpace(const Anchor&)> lagrangian;
  // optics: g^ij rebuilt from a transformed base metric (covariance oracle)
  std::function<Mat(const BaseMetric&, const std::vector<double>&, const std::vector<double>&)> optics_up;
  std::function<double(const JetPoint&)> energy;  // optics absolute energy a |p|^2
  // known closed forms used by the suites
  std::function<Mat(const JetPoint&)> g_closed;  // g^ij
  bool hj_capable = false;                       // H depends on y(1) and p only
};

// a bad parameter, tagged with its config key
struct SpecError : std::runtime_error {
  std::string key;
  SpecError(std::string k, const std::string& msg) : std::runtime_error(k + ": " + msg), key(std::move(k)) {}
};

Space build_space(const SpaceSpec& spec);

// x-only expressions as a base metric
BaseMetric base_metric_from(const std::vector<std::string>& entries, int n, const std::string& name);

struct IntegrateSpec {
  double t1 = 1.0, step = 1e-3;
  std::vector<double> x0, p0;  // empty: defaults
  std::string out;
};

struct SuiteSpec {
  std::string name = "all";
  std::uint64_t seed = 42;
  int points = 100;
};

struct Config {
  SpaceSpec space;
  SuiteSpec suite;
  IntegrateSpec integrate;
  // where each key was set, for error messages
  std::map<std::string, std::pair<int, int>> where;
};

struct ConfigError : std::runtime_error {
  int line, col;
  ConfigError(const std::string& msg, int l, int c)
      : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

Config parse_config(const std::string& text);
Config load_config(const std::string& path);

std::vector<double> default_x0(int n);
std::vector<double> default_p0(int n);

}  // namespace hk
