#pragma once

#include <functional>
#include <string>
#include <vector>

#include "thickpoints/qlaw.hpp"
#include "thickpoints/thickstats.hpp"

namespace thickpoints {

struct ExperimentConfig {
  NiceDomain domain = NiceDomain::unit_disk();
  Point z{0.75, 0.0};
  Point zp{-0.72, 0.15};
  Point x{0.0, 0.0};
  double alpha = 1.0;
  int mesh_min = 1;
  int mesh_max = 3;
  double step = 1e-4;
  double r_min = 1.0 / 256.0;
  long replicates = 0;  // 0 = per-test pinned size
  std::uint64_t seed = 1;
  std::vector<std::string> tests;  // empty = all
  int threads = 0;
  // multiplies the pinned per-test replicate counts (reduced runs)
  double replicate_scale = 1.0;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  // z, z' nice and distinct, x suitable and off-grid up to mesh_max
  void validate() const;
  long scaled(long pinned) const;
};

struct PlotSeries {
  std::string name;
  std::vector<double> xs, ys;
  std::string annotation;
};

struct TestResult {
  std::string id;
  std::string anchor;  // identity the test checks, for traceability
  double analytic = std::numeric_limits<double>::quiet_NaN();
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double z_score = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  bool exploratory = false;
  std::string note;
  double runtime_ms = 0.0;  // reported in CSV only
  std::vector<PlotSeries> plots;
};

struct RegistryEntry {
  std::string id;
  std::string anchor;
  std::function<TestResult(const ExperimentConfig&)> fn;
};

const std::vector<RegistryEntry>& test_registry();
std::vector<TestResult> run_suite(const ExperimentConfig& cfg);

// canonical JSON (no wall-clock fields: identical seeds give identical bytes)
std::string report_json(const ExperimentConfig& cfg,
                        const std::vector<TestResult>& results);
// CSV with one row per result, including runtime_ms
std::string report_csv(const std::vector<TestResult>& results);
std::string plot_svg(const PlotSeries& s);
// writes report.json / report.csv / *.svg under dir; formats from
// {"json","csv","svg"}
void emit_report(const ExperimentConfig& cfg,
                 const std::vector<TestResult>& results,
                 const std::string& dir,
                 const std::vector<std::string>& formats);

bool all_passed(const std::vector<TestResult>& results);

}  // namespace thickpoints
