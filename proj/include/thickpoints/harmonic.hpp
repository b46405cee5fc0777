#pragma once

#include "thickpoints/geometry.hpp"

namespace thickpoints {

enum class KernelRegime { InteriorInterior, InteriorBoundary, BoundaryBoundary };

struct KernelValue {
  double value = 0.0;
  KernelRegime regime = KernelRegime::InteriorInterior;
};

// Green function, both points interior, x != y. Disk domains use the Mobius
// closed form; rectangles use the exact strip kernel plus an exponentially
// convergent image series across the two remaining sides.
double green(const NiceDomain& D, Point x, Point y);

// Poisson kernel: density on boundary arc length of the exit law from x.
double poisson_kernel(const NiceDomain& D, Point x, Point b);

// Boundary Poisson kernel (normal-derivative limit in the first argument).
double boundary_poisson_kernel(const NiceDomain& D, Point b, Point bp);

// Unified H with the regime picked from the point classes:
// interior-interior G/2pi, interior-boundary Poisson, boundary-boundary.
KernelValue kernel_H_value(const NiceDomain& D, Point z, Point zp);
double kernel_H(const NiceDomain& D, Point z, Point zp);

// xi_D(x, z, z') = 2 pi H(x,z) H(x,z') / H(z,z'); x interior, z != z',
// both different from x, each interior or a nice boundary point.
double xi(const NiceDomain& D, Point x, Point z, Point zp);

// C_S(x) = -lim_{y->x} (log|x-y| + G_S(x,y)); equals -log of the conformal
// radius for simply connected S.
double capacity(const NiceDomain& S, Point x);
// the regularized limit itself (= -capacity)
double regularized_green_limit(const NiceDomain& S, Point x);

// C_{D,D1}(x) = C_{D1}(x) - C_D(x); loop-measure mass of escapes from D1.
double capacity_gap(const NiceDomain& D, const NiceDomain& D1, Point x);

// Conformal covariance factor application for H under a map with the given
// boundary derivative moduli (factor 1 per interior endpoint).
double transform_H(double h, PointClass class_z, PointClass class_zp,
                   double abs_dpsi_z, double abs_dpsi_zp);

// Drift fields for the h-transform samplers.
// grad_w log G_D(target, w) (hit-point conditioning)
Point grad_log_green_target(const NiceDomain& D, Point target, Point w);
// grad_w log H_D(w, b) (exit conditioning toward boundary point b);
// rectangles use central differences of the kernel series (spacing 1e-6).
Point grad_log_H_to_boundary(const NiceDomain& D, Point w, Point b);

// quadrature of the Poisson kernel over the boundary (should be ~1)
double poisson_kernel_boundary_integral(const NiceDomain& D, Point x, int n = 512);

}  // namespace thickpoints
