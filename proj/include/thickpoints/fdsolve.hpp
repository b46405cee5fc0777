#pragma once

#include <vector>

#include "thickpoints/geometry.hpp"

namespace thickpoints {

// Independent finite-difference oracle for the rectangle Green function:
// solves the 5-point discrete Dirichlet problem Delta u = -2 pi delta_{x0}
// with a DST-I fast Poisson solve. Sources and probes snap to grid nodes so
// the comparison is free of sub-cell placement error.
class FdPoissonOracle {
 public:
  // n interior+1 subdivisions per side (grid spacing = side / n)
  FdPoissonOracle(const NiceDomain& rect, int n);

  Point snap(Point p) const;
  // solves for the node source nearest x0; returns the snapped source
  Point set_source(Point x0);
  double value_at(Point y) const;  // nearest-node read

 private:
  double x0_, y0_, w_, h_;
  int nx_, ny_;
  std::vector<double> field_;
};

}  // namespace thickpoints
