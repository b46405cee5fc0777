#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "thickpoints/fdsolve.hpp"
#include "thickpoints/harmonic.hpp"
#include "thickpoints/rng.hpp"

using namespace thickpoints;

namespace {

const NiceDomain kDisk = NiceDomain::unit_disk();

Point random_in_disk(Rng& rng, double rmax = 0.95) {
  const double r = rmax * std::sqrt(rng.uniform());
  return std::polar(r, kTwoPi * rng.uniform());
}

// Richardson extrapolation of g(eps) ~ L + c eps as eps -> 0
double richardson(const std::function<double(double)>& g, double eps0) {
  const double g1 = g(eps0), g2 = g(eps0 / 2);
  return 2.0 * g2 - g1;
}

}  // namespace

TEST_CASE("disk Green closed form") {
  CHECK(green(kDisk, Point(0, 0), Point(0.5, 0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(green(kDisk, Point(0, 0), Point(0, 0.5)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  SUBCASE("symmetry and positivity at random pairs") {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
      const Point x = random_in_disk(rng), y = random_in_disk(rng);
      if (std::abs(x - y) < 1e-3) continue;
      const double g1 = green(kDisk, x, y), g2 = green(kDisk, y, x);
      CHECK(g1 == doctest::Approx(g2).epsilon(1e-12));
      CHECK(g1 > 0.0);
    }
  }
  SUBCASE("vanishes along a ray toward the boundary") {
    for (double r : {0.9, 0.99, 0.999, 0.99999}) {
      const double g = green(kDisk, Point(0.2, 0.1), Point(r, 0));
      CHECK(g < green(kDisk, Point(0.2, 0.1), Point(0.9 * r, 0)) + 1e-15);
    }
    CHECK(green(kDisk, Point(0.2, 0.1), Point(0.9999999, 0)) < 1e-6);
  }
  SUBCASE("errors") {
    CHECK_THROWS(green(kDisk, Point(0.1, 0), Point(0.1, 0)));
    CHECK_THROWS(green(kDisk, Point(0.1, 0), Point(2, 0)));
  }
}

TEST_CASE("disk Poisson kernels") {
  // center: uniform 1/(2 pi)
  CHECK(poisson_kernel(kDisk, Point(0, 0), Point(1, 0)) ==
        doctest::Approx(1.0 / kTwoPi).epsilon(1e-14));
  // H(0.5, 1) = 0.75/(2 pi 0.25)
  CHECK(poisson_kernel(kDisk, Point(0.5, 0), Point(1, 0)) ==
        doctest::Approx(3.0 / kTwoPi).epsilon(1e-13));
  // boundary-boundary antipodal: 1/(4 pi)
  CHECK(boundary_poisson_kernel(kDisk, Point(1, 0), Point(-1, 0)) ==
        doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-13));
  SUBCASE("bb symmetric") {
    const Point b = std::polar(1.0, 0.3), bp = std::polar(1.0, 2.1);
    CHECK(boundary_poisson_kernel(kDisk, b, bp) ==
          doctest::Approx(boundary_poisson_kernel(kDisk, bp, b)));
  }
  SUBCASE("normalization over the circle") {
    for (const Point x : {Point(0, 0), Point(0.5, 0.2), Point(-0.7, 0.1)}) {
      CHECK(poisson_kernel_boundary_integral(kDisk, x) ==
            doctest::Approx(1.0).epsilon(1e-8));
    }
  }
  SUBCASE("normal-derivative limit of G recovers 2 pi H (Eq. 2.2 oracle)") {
    const Point x(0.3, -0.2);
    const Point b = std::polar(1.0, 1.1);
    const Point n = kDisk.inward_normal(b);
    auto g_eps = [&](double e) { return green(kDisk, x, b + e * n) / e; };
    const double lim = richardson(g_eps, 1e-5);
    CHECK(lim == doctest::Approx(kTwoPi * poisson_kernel(kDisk, x, b))
                     .epsilon(1e-4));
  }
  SUBCASE("boundary limit of H recovers bb kernel (Eq. 2.3 oracle)") {
    const Point b = std::polar(1.0, 0.4), bp = std::polar(1.0, 2.9);
    const Point n = kDisk.inward_normal(b);
    auto h_eps = [&](double e) {
      return poisson_kernel(kDisk, b + e * n, bp) / e;
    };
    const double lim = richardson(h_eps, 1e-5);
    CHECK(lim ==
          doctest::Approx(boundary_poisson_kernel(kDisk, b, bp)).epsilon(1e-4));
  }
  SUBCASE("Eq. 2.6: interior H scaled limit toward the boundary") {
    const Point z(0.2, 0.5);
    const Point bp = std::polar(1.0, -1.2);
    const Point n = kDisk.inward_normal(bp);
    auto h_eps = [&](double e) {
      return kernel_H(kDisk, z, bp + e * n) / e;
    };
    const double lim = richardson(h_eps, 1e-5);
    CHECK(lim == doctest::Approx(kernel_H(kDisk, z, bp)).epsilon(1e-4));
  }
}

TEST_CASE("xi values and invariance") {
  SUBCASE("interior pair") {
    const double expect = sq(std::log(2.0)) / std::log(1.25);
    CHECK(xi(kDisk, Point(0, 0), Point(0.5, 0), Point(-0.5, 0)) ==
          doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("boundary antipodal pair (definitional composition)") {
    CHECK(xi(kDisk, Point(0, 0), Point(1, 0), Point(-1, 0)) ==
          doctest::Approx(2.0).epsilon(1e-13));
  }
  SUBCASE("conformal invariance under random Mobius maps") {
    Rng rng(77);
    for (int i = 0; i < 100; ++i) {
      const MobiusMap m(random_in_disk(rng, 0.8),
                        std::polar(1.0, kTwoPi * rng.uniform()));
      const Point x = random_in_disk(rng, 0.9);
      Point z, zp;
      if (i % 3 == 0) {
        z = std::polar(1.0, kTwoPi * rng.uniform());
        zp = std::polar(1.0, kTwoPi * rng.uniform());
      } else if (i % 3 == 1) {
        z = random_in_disk(rng, 0.9);
        zp = std::polar(1.0, kTwoPi * rng.uniform());
      } else {
        z = random_in_disk(rng, 0.9);
        zp = random_in_disk(rng, 0.9);
      }
      if (std::abs(z - zp) < 1e-2 || std::abs(z - x) < 1e-2 ||
          std::abs(zp - x) < 1e-2)
        continue;
      auto push = [&](Point p) {
        Point q = m.map(p);
        if (kDisk.is_boundary(p)) q /= std::abs(q);
        return q;
      };
      const double a = xi(kDisk, x, z, zp);
      const double b = xi(kDisk, push(x), push(z), push(zp));
      CHECK(b == doctest::Approx(a).epsilon(1e-10));
    }
  }
  SUBCASE("boundary-boundary xi stays within the Lemma 4.6 bound") {
    Rng rng(5150);
    double emp_sup = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const Point x = random_in_disk(rng, 0.98);
      const Point z = std::polar(1.0, kTwoPi * rng.uniform());
      const Point zp = std::polar(1.0, kTwoPi * rng.uniform());
      if (std::abs(z - zp) < 1e-3) continue;
      emp_sup = std::max(emp_sup, xi(kDisk, x, z, zp));
    }
    CHECK(emp_sup <= 4.0 + 1e-12);
  }
  SUBCASE("degenerate inputs rejected") {
    CHECK_THROWS(xi(kDisk, Point(0, 0), Point(0.5, 0), Point(0.5, 0)));
    CHECK_THROWS(xi(kDisk, Point(0.5, 0), Point(0.5, 0), Point(-0.5, 0)));
  }
}

TEST_CASE("capacities") {
  CHECK(capacity(kDisk, Point(0, 0)) == doctest::Approx(0.0));
  CHECK(capacity(NiceDomain::disk(Point(0, 0), 0.1), Point(0, 0)) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-13));
  SUBCASE("capacity_C(UnitDisk, a) = -log(1-|a|^2), quadrature cross-check") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
      const Point a = random_in_disk(rng, 0.9);
      CHECK(capacity(kDisk, a) + std::log(1.0 - std::norm(a)) ==
            doctest::Approx(0.0).epsilon(1e-10));
      // defining integral -int log|x-y| H(x,y) dy by quadrature
      const auto q = kDisk.boundary_quadrature(2048);
      double integral = 0.0;
      for (std::size_t k = 0; k < q.points.size(); ++k)
        integral -= q.weights[k] * std::log(std::abs(a - q.points[k])) *
                    poisson_kernel(kDisk, a, q.points[k]);
      CHECK(integral == doctest::Approx(capacity(kDisk, a)).epsilon(1e-8));
    }
  }
  SUBCASE("capacity gap") {
    CHECK(capacity_gap(kDisk, NiceDomain::disk(Point(0, 0), 0.1), Point(0, 0)) ==
          doctest::Approx(std::log(10.0)).epsilon(1e-12));
    CHECK(capacity_gap(kDisk, kDisk, Point(0.3, 0.2)) == doctest::Approx(0.0));
    const auto D1 = NiceDomain::disk(Point(0, 0), 0.5);
    const Point x(0.25, 0.0);
    CHECK(capacity_gap(kDisk, D1, x) ==
          doctest::Approx(capacity(D1, x) - capacity(kDisk, x)));
    CHECK(capacity_gap(kDisk, D1, x) > 0.0);
    CHECK_THROWS(capacity_gap(kDisk, D1, Point(0.7, 0)));
  }
  SUBCASE("rectangle capacity by quadrature of the defining integral") {
    const auto R = NiceDomain::rect(0, 0, 1, 1);
    for (const Point x : {Point(0.5, 0.5), Point(0.3, 0.6), Point(0.8, 0.2)}) {
      const auto q = R.boundary_quadrature(4096);
      double integral = 0.0;
      for (std::size_t k = 0; k < q.points.size(); ++k)
        integral -= q.weights[k] * std::log(std::abs(x - q.points[k])) *
                    poisson_kernel(R, x, q.points[k]);
      CHECK(integral == doctest::Approx(capacity(R, x)).epsilon(1e-7));
    }
  }
}

TEST_CASE("transform_H factor rules") {
  CHECK(transform_H(1.0, PointClass::Interior, PointClass::Interior, 2.0, 3.0) ==
        doctest::Approx(1.0));
  CHECK(transform_H(1.0, PointClass::Interior, PointClass::Boundary, 5.0, 2.0) ==
        doctest::Approx(0.5));
  CHECK(transform_H(1.0, PointClass::Boundary, PointClass::Boundary, 2.0, 2.0) ==
        doctest::Approx(0.25));
  CHECK_THROWS(
      transform_H(1.0, PointClass::Outside, PointClass::Interior, 1.0, 1.0));
}

TEST_CASE("mobius image domains evaluate through the transform rules") {
  const MobiusMap m(Point(0.25, -0.15), std::polar(1.0, 0.9));
  const auto img = NiceDomain::mobius_image(kDisk, m);
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Point x = random_in_disk(rng, 0.9);
    const Point y = random_in_disk(rng, 0.9);
    if (std::abs(x - y) < 1e-2) continue;
    // image set is the unit disk: the pulled-back kernels must agree with the
    // direct disk formulas
    CHECK(green(img, x, y) == doctest::Approx(green(kDisk, x, y)).epsilon(1e-11));
  }
  const Point x(0.2, 0.1);
  const Point b = std::polar(1.0, 0.7);
  CHECK(poisson_kernel(img, x, b) ==
        doctest::Approx(poisson_kernel(kDisk, x, b)).epsilon(1e-10));
  CHECK(boundary_poisson_kernel(img, b, std::polar(1.0, 2.0)) ==
        doctest::Approx(boundary_poisson_kernel(kDisk, b, std::polar(1.0, 2.0)))
            .epsilon(1e-10));
}

TEST_CASE("rectangle kernels") {
  const auto R = NiceDomain::rect(0, 0, 1, 1);
  SUBCASE("symmetry at random pairs") {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
      const Point x(0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform());
      const Point y(0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform());
      if (std::abs(x - y) < 1e-3) continue;
      CHECK(green(R, x, y) == doctest::Approx(green(R, y, x)).epsilon(1e-10));
    }
  }
  SUBCASE("agrees with the finite-difference oracle (256^2 here)") {
    FdPoissonOracle fd(R, 256);
    Rng rng(23);
    for (int i = 0; i < 5; ++i) {
      Point x(0.15 + 0.7 * rng.uniform(), 0.15 + 0.7 * rng.uniform());
      Point y(0.15 + 0.7 * rng.uniform(), 0.15 + 0.7 * rng.uniform());
      if (std::abs(x - y) < 0.15) continue;
      x = fd.set_source(x);
      y = fd.snap(y);
      CHECK(fd.value_at(y) == doctest::Approx(green(R, x, y)).epsilon(4e-3));
    }
  }
  SUBCASE("discrete harmonicity of G in the second argument") {
    const Point x(0.3, 0.4);
    const double h = 1e-3;
    for (const Point w : {Point(0.6, 0.6), Point(0.7, 0.25)}) {
      const double lap =
          (green(R, x, w + Point(h, 0)) + green(R, x, w - Point(h, 0)) +
           green(R, x, w + Point(0, h)) + green(R, x, w - Point(0, h)) -
           4.0 * green(R, x, w)) / (h * h);
      CHECK(std::abs(lap) < 1e-3);  // O(h^2) for the analytic solution
    }
  }
  SUBCASE("Poisson kernel normalizes and satisfies the Eq. 2.2 oracle") {
    const Point x(0.4, 0.55);
    CHECK(poisson_kernel_boundary_integral(R, x, 2048) ==
          doctest::Approx(1.0).epsilon(1e-8));
    const Point b(0.35, 0.0);
    const Point n = R.inward_normal(b);
    auto g_eps = [&](double e) { return green(R, x, b + e * n) / e; };
    CHECK(richardson(g_eps, 1e-5) ==
          doctest::Approx(kTwoPi * poisson_kernel(R, x, b)).epsilon(1e-4));
  }
  SUBCASE("boundary Poisson kernel via the Eq. 2.3 oracle") {
    const Point b(0.3, 0.0), bp(1.0, 0.7);
    const Point n = R.inward_normal(b);
    auto h_eps = [&](double e) { return poisson_kernel(R, b + e * n, bp) / e; };
    CHECK(richardson(h_eps, 1e-5) ==
          doctest::Approx(boundary_poisson_kernel(R, b, bp)).epsilon(1e-4));
    // same-edge pair
    const Point b2(0.8, 0.0);
    auto h2 = [&](double e) { return poisson_kernel(R, b + e * n, b2) / e; };
    CHECK(richardson(h2, 1e-5) ==
          doctest::Approx(boundary_poisson_kernel(R, b, b2)).epsilon(1e-4));
  }
  SUBCASE("tall rectangle (swapped orientation)") {
    const auto T = NiceDomain::rect(0, 0, 2, 0.5);
    const Point x(0.5, 0.25), y(1.2, 0.3);
    CHECK(green(T, x, y) == doctest::Approx(green(T, y, x)).epsilon(1e-10));
    CHECK(poisson_kernel_boundary_integral(T, x, 4096) ==
          doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("drift gradients match central differences") {
  Rng rng(31);
  SUBCASE("disk, hit-point drift") {
    const Point target(0.1, -0.2);
    for (int i = 0; i < 20; ++i) {
      const Point w = random_in_disk(rng, 0.85);
      if (std::abs(w - target) < 0.05) continue;
      const Point g = grad_log_green_target(kDisk, target, w);
      const double h = 1e-6;
      auto lg = [&](Point p) { return std::log(green(kDisk, target, p)); };
      const double gx = (lg(w + Point(h, 0)) - lg(w - Point(h, 0))) / (2 * h);
      const double gy = (lg(w + Point(0, h)) - lg(w - Point(0, h))) / (2 * h);
      CHECK(g.real() == doctest::Approx(gx).epsilon(1e-5));
      CHECK(g.imag() == doctest::Approx(gy).epsilon(1e-5));
    }
  }
  SUBCASE("rect, hit-point drift") {
    const auto R = NiceDomain::rect(0, 0, 1, 1);
    const Point target(0.45, 0.55);
    for (const Point w : {Point(0.2, 0.3), Point(0.7, 0.8), Point(0.52, 0.5)}) {
      const Point g = grad_log_green_target(R, target, w);
      const double h = 1e-6;
      auto lg = [&](Point p) { return std::log(green(R, target, p)); };
      const double gx = (lg(w + Point(h, 0)) - lg(w - Point(h, 0))) / (2 * h);
      const double gy = (lg(w + Point(0, h)) - lg(w - Point(0, h))) / (2 * h);
      CHECK(g.real() == doctest::Approx(gx).epsilon(1e-4));
      CHECK(g.imag() == doctest::Approx(gy).epsilon(1e-4));
    }
  }
  SUBCASE("disk, exit drift") {
    const Point b = std::polar(1.0, 0.5);
    for (int i = 0; i < 20; ++i) {
      const Point w = random_in_disk(rng, 0.8);
      const Point g = grad_log_H_to_boundary(kDisk, w, b);
      const double h = 1e-6;
      auto lh = [&](Point p) { return std::log(poisson_kernel(kDisk, p, b)); };
      const double gx = (lh(w + Point(h, 0)) - lh(w - Point(h, 0))) / (2 * h);
      const double gy = (lh(w + Point(0, h)) - lh(w - Point(0, h))) / (2 * h);
      CHECK(g.real() == doctest::Approx(gx).epsilon(1e-5));
      CHECK(g.imag() == doctest::Approx(gy).epsilon(1e-5));
    }
  }
}

TEST_CASE("kernel regimes reported") {
  CHECK(kernel_H_value(kDisk, Point(0.1, 0), Point(0.5, 0)).regime ==
        KernelRegime::InteriorInterior);
  CHECK(kernel_H_value(kDisk, Point(0.1, 0), Point(1, 0)).regime ==
        KernelRegime::InteriorBoundary);
  CHECK(kernel_H_value(kDisk, Point(1, 0), Point(0, 1)).regime ==
        KernelRegime::BoundaryBoundary);
  CHECK(kernel_H(kDisk, Point(1, 0), Point(0.1, 0)) ==
        doctest::Approx(kernel_H(kDisk, Point(0.1, 0), Point(1, 0))));
}
