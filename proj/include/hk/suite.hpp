#pragma once
// Verification suites over a catalog space, and their reports.
//
// Every suite samples its own points from a stream keyed by (seed, suite), so
// a suite's rows do not depend on which other suites ran alongside it.

#include <cstdint>
#include <string>
#include <vector>

#include "hk/catalog.hpp"

namespace hk {

constexpr const char* kReportSchema = "hkgeom-report/1";
constexpr const char* kReportSetSchema = "hkgeom-report-set/1";

enum class Compare { AtMost, Above, Within };

struct Row {
  std::string check;
  std::string property;  // what the residual measures
  int point = -1;        // -1: aggregate row; otherwise the sample that raised an error
  double residual = 0.0;
  double tol = 0.0, hi = 0.0;  // Within: tol <= residual <= hi
  Compare cmp = Compare::AtMost;
  bool pass = false, skipped = false;
  int points = 0;
  std::uint64_t seed = 0;
  std::string note;
};

struct Report {
  std::string space, title, suite;
  int n = 0, k = 0;
  std::uint64_t seed = 0;
  int points = 0;
  std::vector<Row> rows;
  int failed() const;
};

const std::vector<std::string>& suite_names();

// points: requested sample count per check (curvature uses half, the
// trajectory-heavy checks a fifth)
Report run_suite(const Space& s, const std::string& suite, std::uint64_t seed, int points,
                 const IntegrateSpec& integ = {});

// componentwise uniform in [-1, 1]; rejects points near the null section or
// failing the metric regularity gate. Other errors propagate.
std::vector<JetPoint> sample_points(const Space& s, CounterRng& rng, int count);

std::string report_json(const Report& r);
std::string report_table(const Report& r);
// one document from several report documents; failed counts failing rows
std::string merge_reports(const std::vector<std::string>& docs, int& failed);

}  // namespace hk
