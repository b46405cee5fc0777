#pragma once

#include "thickpoints/qlaw.hpp"
#include "thickpoints/stats.hpp"

namespace thickpoints {

// (1/(r^2 (log r)^2)) int_0^t 1{B_s in B(x,r)} ds per radius, trapezoid with
// exact circle-crossing interpolation on the polyline.
std::vector<double> occupation_ratio(const PathSample& path, Point x,
                                     const std::vector<double>& radii,
                                     double t);

// Radial reduction of the local-time proof: arrivals of a Poisson(beta)
// process on (0, infinity), one squared Bessel(4) started at 0 per arrival,
// X_t = sum of the living trajectories.
struct XProcess {
  double beta = 0.0;
  std::vector<double> arrivals;
  std::vector<double> t_grid;
  std::vector<double> values;
};
XProcess x_process(double beta, const std::vector<double>& t_grid, Rng& rng);

// Good-event diagnostics (per-scale bounds on N and Upsilon).
struct GoodEventReport {
  double r0 = 0.0, gamma = 0.0;
  std::vector<double> radii;
  std::vector<char> n_ok;
  std::vector<char> upsilon_ok;
  bool distance_ok = true;
  bool all_ok = true;
};
GoodEventReport good_event(const QPathBundle& b, Point z, Point zp, double r0,
                           double gamma);

// Correlation-sum dimension estimate from fields across levels: least
// squares slope of log E[sum of squared cell masses] against n log 2, with a
// bootstrap confidence interval over replicates. Exploratory.
struct DimensionEstimate {
  double dimension = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  std::vector<int> levels;
  std::vector<double> log_mean_sum_sq;
};
DimensionEstimate correlation_dimension(
    const std::vector<int>& levels,
    const std::vector<std::vector<double>>& sum_sq_per_level, Rng& rng,
    int bootstrap = 200);

// sum of squared interior-cell masses of one field
double field_sum_sq(const MeasureField& f);

}  // namespace thickpoints
