#pragma once

#include <string>
#include <vector>

#include "thickpoints/sampler.hpp"

namespace thickpoints {

enum class EndpointClass { PathEndpoint, BoundaryOfD1, PointX };

// The (start, end, order, hits-x) data of one excursion inside D1; the
// sub-path geometry is retained as an index range into the parent path.
struct ExcursionRecord {
  Point e_g{0, 0};
  Point e_d{0, 0};
  int order = 0;
  bool hits_x = false;
  EndpointClass start_class = EndpointClass::BoundaryOfD1;
  EndpointClass end_class = EndpointClass::BoundaryOfD1;
  std::size_t i_begin = 0, i_end = 0;  // pos[i_begin..i_end] covers it
  double t_begin = 0.0, t_end = 0.0;
};

// Ordered excursions of the path inside D1 (away from the complement of D1
// and the two path endpoints). x is the marked point for hits_x flags; pass
// any point never visited when irrelevant.
std::vector<ExcursionRecord> excursions_inside(const PathSample& path,
                                               const NiceDomain& D1, Point x);

// Alternating hitting structure of Notation 3.1: t_{i+1} first hit of the
// boundary of D2 after s_i, s_{i+1} first hit of the boundary of D1 (or the
// path end) after t_{i+1}. hit_indices lists the 1-based i with an x-visit
// in [t_i, s_i].
struct CrossingTimes {
  std::vector<double> t_list;
  std::vector<double> s_list;
  std::vector<int> hit_indices;
};
CrossingTimes crossing_times(const PathSample& path, const NiceDomain& D2,
                             const NiceDomain& D1, Point x);

// Path-form crossing counts: number of excursions from x out to the circle
// of each radius (radii need not be sorted).
std::vector<long> count_crossings(const PathSample& path, Point x,
                                  const std::vector<double>& radii);

std::string excursions_to_json(const std::vector<ExcursionRecord>& records);

// xi values of a record sequence for a weight evaluation at x in D1, using
// the regime-appropriate kernels; endpoint classes come from the records.
std::vector<double> xi_values_for(const NiceDomain& D1, Point x,
                                  const std::vector<ExcursionRecord>& records);

}  // namespace thickpoints
