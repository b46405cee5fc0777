#pragma once

#include <functional>

#include "thickpoints/excursions.hpp"
#include "thickpoints/measurefield.hpp"

namespace thickpoints {

// Three-part trajectory under the tilted law: conditioned approach z -> x,
// Poisson loop soup at x (loops escaping the truncation disk S, tagged by
// arrival coordinates in [0, alpha]), conditioned exit x -> z'.
struct QPathBundle {
  Point x{0, 0};
  double alpha = 0.0;
  PathSample approach;
  std::vector<double> tags;  // ascending in [0, alpha]
  std::vector<PathSample> loops;
  PathSample exit_leg;

  CircleLadder ladder;
  std::vector<std::vector<char>> loop_hits;  // per loop, per ladder radius
  std::vector<char> approach_ladder_hits;
  std::vector<char> exit_ladder_hits;

  std::vector<double> cum_lifetimes;  // Lambda at each tag, ascending

  double lambda_alpha() const {
    return cum_lifetimes.empty() ? 0.0 : cum_lifetimes.back();
  }
  double t_x() const { return approach.duration(); }
  PathSample concatenated() const;

  // loop-decomposed crossing counts: N(x, r) per ladder radius
  std::vector<long> loop_crossing_counts() const;
};

// Samples the bundle. The truncation disk is S = Disk(x, r_min); loops that
// stay inside S never touch an observable at radius >= r_min and are not
// sampled. Ladder radii (all >= r_min) get crossing bookkeeping.
QPathBundle sample_q(const NiceDomain& D, Point z, Point zp, Point x,
                     double alpha, double r_min, double h, Rng& rng,
                     const std::vector<double>& ladder_radii = {});

// Local time at x: the inverse of the loop-lifetime subordinator with the
// three-case boundary values (0 before T_x, alpha after T_x + Lambda_alpha).
struct LocalTimeCurve {
  double t_x = 0.0;
  double alpha = 0.0;
  std::vector<double> cum;   // cumulative lifetimes at the tags
  std::vector<double> tags;  // ascending
  double value(double t) const;
  double lambda_alpha() const { return cum.empty() ? 0.0 : cum.back(); }
};
LocalTimeCurve local_time_curve(const QPathBundle& b);

// Upsilon(x, r) per ladder radius of the concatenated trajectory: sum of
// xi_{B(x,r)}(x, e_g, e_d) over excursions inside B(x, r) avoiding x.
std::vector<double> bundle_upsilon(const QPathBundle& b);

// Radon-Nikodym consistency machinery (Corollary 3.5): a Q-direct estimate
// of an excursion-data event versus the weighted estimate under the plain
// excursion law.
struct QConfig {
  NiceDomain D = NiceDomain::unit_disk();
  NiceDomain D1 = NiceDomain::unit_disk();  // disk centered at x
  Point z{0, 0}, zp{0, 0}, x{0, 0};
  double alpha = 1.0;
  double h = 1e-4;
};

using ExcursionEvent =
    std::function<bool(const std::vector<ExcursionRecord>&)>;

struct RnEstimates {
  double q_direct = 0.0, q_se = 0.0;
  double p_weighted = 0.0, p_se = 0.0;
  double combined_se() const;
  double gap() const { return q_direct - p_weighted; }
};

RnEstimates rn_consistency_test(const QConfig& cfg, const ExcursionEvent& event,
                                long replicates, std::uint64_t seed,
                                std::uint64_t stream);

}  // namespace thickpoints
