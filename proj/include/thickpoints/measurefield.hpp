#pragma once

#include <string>
#include <vector>

#include "thickpoints/excursions.hpp"
#include "thickpoints/geometry.hpp"

namespace thickpoints {

// Per-cell masses approximating the grid-level measure at one mesh level.
struct MeasureField {
  GridPartition partition;
  std::vector<double> masses;  // aligned with partition.cells
  std::vector<char> clipped;   // 1 for boundary-clipped cells (excluded)
  double alpha = 0.0;

  double total_mass() const;
  // sum of cell masses over cells contained in the rectangle (must be
  // cell-aligned within tolerance)
  double mass_in_rect(double x0, double y0, double x1, double y1) const;
};

// Excursion endpoint records per cell from one sweep over the path.
struct CellRecords {
  std::vector<std::vector<ExcursionRecord>> per_cell;  // aligned with cells
};
CellRecords collect_cell_records(const PathSample& path,
                                 const GridPartition& p);

// Field at one level: per interior cell, the quadrature over x of the
// martingale weight built from that cell's excursion endpoints and kernels.
// Guard: path.step <= mesh^2 / 100.
MeasureField build_field(const PathSample& path, const GridPartition& p,
                         double alpha);

// Same records evaluated at several alphas (xi values computed once).
std::vector<MeasureField> build_fields(const PathSample& path,
                                       const GridPartition& p,
                                       const std::vector<double>& alphas);

// Per-realization trajectory of the cell-aligned rectangle mass across
// levels n_lo..n_hi.
std::vector<double> refine_sequence(const PathSample& path,
                                    const NiceDomain& domain, Point offset,
                                    int n_lo, int n_hi, double alpha,
                                    double ax0, double ay0, double ax1,
                                    double ay1);

// p-fold product field: per-cell quadrature of the product of the per-path
// weights (independent realizations on one partition).
MeasureField product_field(const std::vector<const PathSample*>& paths,
                           const GridPartition& p, double alpha);

// occupation time of each cell (trapezoid with crossing interpolation)
std::vector<double> occupation_by_cell(const PathSample& path,
                                       const GridPartition& p);

std::string field_to_csv(const MeasureField& f);
std::string field_to_json(const MeasureField& f);

}  // namespace thickpoints
