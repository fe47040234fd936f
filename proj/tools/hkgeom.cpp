// hkgeom: describe, check, integrate, legendre, report
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad configuration or
// arguments.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hk/suite.hpp"

using namespace hk;

namespace {

struct Common {
  std::string config, space;
  int n = 0, k = 0;
};

void add_common(CLI::App* c, Common& o) {
  c->add_option("--config", o.config, "configuration file ([space], [suite], [integrate])");
  c->add_option("--space", o.space, "catalog space kind (overrides the config)");
  c->add_option("--n", o.n, "base dimension (overrides the config)");
  c->add_option("--k", o.k, "order (overrides the config)");
}

Config load(const Common& o) {
  Config c = o.config.empty() ? Config{} : load_config(o.config);
  if (!o.space.empty()) {
    const auto& ks = catalog_kinds();
    if (std::find(ks.begin(), ks.end(), o.space) == ks.end()) throw SpecError("kind", "unknown space kind '" + o.space + "'");
    c.space.kind = o.space;
  }
  if (o.n) c.space.n = o.n;
  if (o.k) c.space.k = o.k;
  return c;
}

// a bad parameter surfaced while building: point at the config line when there is one
int spec_failure(const SpecError& e, const Config& c, const std::string& file) {
  auto it = c.where.find(e.key);
  if (it != c.where.end())
    std::cerr << "config error: " << file << ":" << it->second.first << ":" << it->second.second << ": " << e.what() << "\n";
  else
    std::cerr << "config error: " << e.what() << "\n";
  return 2;
}

void write_text(const std::string& path, const std::string& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << s;
}

std::string verdict_text(const HomogeneityVerdict& v) {
  if (v.indeterminate) return "indeterminate (value 0)";
  std::ostringstream os;
  os.precision(6);
  if (v.homogeneous)
    os << "homogeneous of degree " << v.r;
  else
    os << "not homogeneous (Euler ratio " << v.r << ", scaling defect " << v.worst_rel << ")";
  return os.str();
}

int describe(const Space& s) {
  const BundleShape& sh = s.shape;
  std::cout << s.title << "\n";
  std::cout << "kind " << s.spec.kind << ", n = " << sh.n << ", k = " << sh.k << ", dim T*kM = " << sh.dim() << "\n";
  std::cout << "connection: " << s.N.name << "\n";
  CounterRng rng(7);
  std::vector<JetPoint> pts = sample_points(s, rng, 20);
  if (pts.empty()) {
    std::cout << "no regular sample point found\n";
    return 1;
  }
  const JetPoint& u = pts[0];
  std::cout << "reference point " << u.str() << "\n";
  MetricPair mp = metric_at(s.metric, u);
  std::cout << "signature of g^ij: (" << mp.npos << ", " << mp.nneg << "), condition " << mp.cond << "\n";
  auto kinds = {std::pair{EulerKind::Combined, "combined"}, std::pair{EulerKind::Liouville, "Liouville"},
                std::pair{EulerKind::Momentum, "momentum"}};
  if (s.H)
    for (auto [kd, name] : kinds) std::cout << "H, " << name << " scaling: " << verdict_text(homogeneity_degree(*s.H, u, kd)) << "\n";
  if (s.K)
    for (auto [kd, name] : kinds) std::cout << "K, " << name << " scaling: " << verdict_text(homogeneity_degree(*s.K, u, kd)) << "\n";
  if (s.energy) std::cout << "absolute energy a|p|^2 = " << s.energy(u) << "\n";
  bool reducible = true;
  for (const auto& v : pts) reducible = reducible && reducibility_probe(s.metric, v).reducible;
  std::cout << (reducible ? "reducible to a Hamilton space" : "not reducible to a Hamilton space") << " (C^ijh probe, "
            << pts.size() << " points)\n";
  return 0;
}

int integrate(const Space& s, const IntegrateSpec& g, const std::string& out) {
  int n = s.shape.n;
  if (!s.H) throw std::runtime_error("space has no Hamiltonian to integrate");
  std::vector<double> x0 = g.x0.empty() ? default_x0(n) : g.x0, p0 = g.p0.empty() ? default_p0(n) : g.p0;
  if (static_cast<int>(x0.size()) != n || static_cast<int>(p0.size()) != n) throw SpecError("x0", "x0 and p0 need n entries");
  Trajectory tr = integrate_hj(*s.H, x0, p0, g.t1, g.step);
  std::ostringstream os;
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i + 1;
  for (int i = 0; i < n; ++i) os << ",p" << i + 1;
  os << ",E\n";
  char buf[40];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& smp : tr.samples) {
    os << num(smp.t);
    for (double v : smp.x) os << "," << num(v);
    for (double v : smp.p) os << "," << num(v);
    os << "," << num(smp.E) << "\n";
  }
  if (out.empty())
    std::cout << os.str();
  else
    write_text(out, os.str());
  std::cerr << "steps " << tr.samples.size() - 1 << ", energy drift " << tr.drift << "\n";
  if (tr.failure) {
    std::cerr << "integration stopped at step " << *tr.failure << ": " << tr.failure_msg << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamilton and Cartan spaces of order k: catalog and verification"};
  app.require_subcommand(1);
  Common o;
  std::string json_out, csv_out, suite, format = "table";
  std::uint64_t seed = 0;
  int points = 0;
  double t1 = 0, step = 0;
  std::vector<std::string> inputs;
  std::string merged;

  auto* d = app.add_subcommand("describe", "print dimensions, homogeneity verdicts and signature");
  add_common(d, o);
  auto* c = app.add_subcommand("check", "run verification suites");
  add_common(c, o);
  c->add_option("--suite", suite, "metric|connection|curvature|dynamics|legendre|structures|homogeneity|covariance|all");
  c->add_option("--seed", seed, "sampling seed");
  c->add_option("--points", points, "sample points per check");
  c->add_option("--json", json_out, "write the JSON report here");
  c->add_option("--format", format, "stdout format: table or json")->check(CLI::IsMember({"table", "json"}));
  auto* i = app.add_subcommand("integrate", "Hamilton-Jacobi trajectory as CSV");
  add_common(i, o);
  i->add_option("--t1", t1, "end time");
  i->add_option("--step", step, "RK4 step");
  i->add_option("--out", csv_out, "CSV file (default stdout)");
  auto* l = app.add_subcommand("legendre", "Legendre round trips and dual-of-dual checks");
  add_common(l, o);
  l->add_option("--seed", seed, "sampling seed");
  l->add_option("--points", points, "sample points");
  l->add_option("--json", json_out, "write the JSON report here");
  auto* r = app.add_subcommand("report", "merge JSON reports into one document");
  r->add_option("inputs", inputs, "report files")->required();
  r->add_option("--out", merged, "merged document (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (r->parsed()) {
    try {
      std::vector<std::string> docs;
      for (const auto& f : inputs) {
        std::ifstream in(f);
        if (!in) throw std::runtime_error("cannot read " + f);
        std::stringstream ss;
        ss << in.rdbuf();
        docs.push_back(ss.str());
      }
      int failed = 0;
      std::string doc = merge_reports(docs, failed);
      if (merged.empty())
        std::cout << doc;
      else
        write_text(merged, doc);
      std::cerr << inputs.size() << " reports, " << failed << " failed rows\n";
      return failed ? 1 : 0;
    } catch (const std::exception& e) {
      std::cerr << "report error: " << e.what() << "\n";
      return 2;
    }
  }

  Config cfg;
  try {
    cfg = load(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << o.config << ":" << e.line << ":" << e.col << ": "
              << std::string(e.what()).substr(std::string(e.what()).find(": ") + 2) << "\n";
    return 2;
  } catch (const SpecError& e) {
    return spec_failure(e, cfg, o.config);
  }
  if (c->parsed() || l->parsed()) {
    if (!suite.empty()) cfg.suite.name = suite;
    if (l->parsed()) cfg.suite.name = "legendre";
    if (c->count("--seed") || l->count("--seed")) cfg.suite.seed = seed;
    if (points > 0) cfg.suite.points = points;
  }
  if (i->parsed()) {
    if (t1 > 0) cfg.integrate.t1 = t1;
    if (step > 0) cfg.integrate.step = step;
    if (!csv_out.empty()) cfg.integrate.out = csv_out;
  }

  Space s;
  try {
    s = build_space(cfg.space);
  } catch (const SpecError& e) {
    return spec_failure(e, cfg, o.config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (d->parsed()) return describe(s);
    if (i->parsed()) return integrate(s, cfg.integrate, cfg.integrate.out);
    Report rep;
    try {
      rep = run_suite(s, cfg.suite.name, cfg.suite.seed, cfg.suite.points, cfg.integrate);
    } catch (const SpecError& e) {
      return spec_failure(e, cfg, o.config);
    }
    if (!json_out.empty()) write_text(json_out, report_json(rep));
    std::cout << (format == "json" ? report_json(rep) : report_table(rep));
    return rep.failed() ? 1 : 0;
  } catch (const SpecError& e) {
    return spec_failure(e, cfg, o.config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
