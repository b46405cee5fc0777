#pragma once

#include <vector>

#include "thickpoints/harmonic.hpp"

namespace thickpoints {

// One excursion weight input: the per-excursion xi values, alpha, and the
// capacity C of the domain the excursions live in.
struct WeightInput {
  std::vector<double> xi_values;
  double alpha = 0.0;
  double capacity = 0.0;
};

// Elementary symmetric polynomials e_0..e_n of xs (e_0 = 1).
std::vector<double> elementary_symmetric(const std::vector<double>& xs);

// M(x, alpha) = e^{-alpha C} sum_{L>=1} alpha^{L-1}/(L-1)! e_L(xi).
// The L-sum runs over sets of L distinct excursions, each set once, which is
// what makes E[M_{D2} | F^+_{D1}] = M_{D1} close. Evaluated in O(n^2) through
// the e_L recurrence; switches to log-space accumulation on overflow.
double martingale_weight(const WeightInput& w);

// Same weight restricted to excursions that avoid x (hits_x flags aligned
// with xi_values).
double martingale_weight_avoiding_x(const std::vector<double>& xi_values,
                                    const std::vector<bool>& hits_x,
                                    double alpha, double capacity);

// --- truncated weights (nested-domain decompositions) ---------------------

enum class TruncatedEndpointCase {
  BothOnBoundary,  // e_g, e_d on the boundary of D1
  BothAtX,         // a loop at x escaping S
  Mixed,           // anything else (one endpoint x or an interior endpoint)
};

struct TruncatedExcursion {
  TruncatedEndpointCase kind = TruncatedEndpointCase::BothOnBoundary;
  Point e_g{0, 0};
  Point e_d{0, 0};
};

struct TruncatedXiSpec {
  NiceDomain D1 = NiceDomain::unit_disk();
  NiceDomain D2 = NiceDomain::unit_disk();
  NiceDomain S = NiceDomain::unit_disk();
  Point x{0, 0};
};

// xi_{x,D1,S,D2}(u, e_g, e_d) per the three-case table.
double truncated_xi(const TruncatedXiSpec& spec, Point u,
                    const TruncatedExcursion& e);

// M_{x,D1,S,D2}(u, alpha): generating-function evaluation of the truncated
// weight over the given excursion set.
double truncated_weight(const TruncatedXiSpec& spec, Point u, double alpha,
                        const std::vector<TruncatedExcursion>& excursions);

// Upsilon = plain sum of the per-excursion truncated xi values.
double upsilon_sum(const TruncatedXiSpec& spec, Point u,
                   const std::vector<TruncatedExcursion>& excursions);
double upsilon_sum(const std::vector<double>& xi_values);

// Eq. 3.17-style bound value: Upsilon e^{-alpha C} e^{2 sqrt(alpha Upsilon)}.
double truncated_weight_bound(double upsilon, double alpha, double capacity);

}  // namespace thickpoints
