#include "thickpoints/harmonic.hpp"

#include <cmath>

namespace thickpoints {

namespace {

// ---------- unit disk closed forms ----------

double green_unit(Point x, Point y) {
  return std::log(std::abs(1.0 - x * std::conj(y))) - std::log(std::abs(x - y));
}

double poisson_unit(Point x, Point b) {
  return (1.0 - std::norm(x)) / (kTwoPi * std::norm(x - b));
}

double bpk_unit(Point b, Point bp) { return 1.0 / (kPi * std::norm(b - bp)); }

// ---------- rectangle: strip kernel + vertical image series ----------
//
// Local coordinates put the rectangle at (0,W)x(0,H) with W the shorter
// side (axes swapped if needed; the swap is an isometry). The strip
// {0 < Re < W} maps to the upper half plane by phi(z) = exp(i pi z / W),
// and reflections across Im = 0, H give images v*q^k and (1/v)*q^k of
// v = phi(w), with q = exp(-2 pi H / W) <= e^{-2 pi}. Terms decay like q^|k|.
struct RectMap {
  double W = 1, H = 1;
  bool swapped = false;
  double ox = 0, oy = 0;
  double q = 0;

  explicit RectMap(const NiceDomain& D) {
    const double w = D.x1() - D.x0(), h = D.y1() - D.y0();
    swapped = w > h;
    ox = D.x0();
    oy = D.y0();
    W = swapped ? h : w;
    H = swapped ? w : h;
    q = std::exp(-kTwoPi * H / W);
  }
  Point local(Point p) const {
    const double lx = p.real() - ox, ly = p.imag() - oy;
    return swapped ? Point(ly, lx) : Point(lx, ly);
  }
  Point dir(Point d) const {
    return swapped ? Point(d.imag(), d.real()) : d;
  }
  Point phi(Point zl) const {
    // exp(i pi z / W)
    const Point e = Point(0, kPi / W) * zl;
    return std::exp(e);
  }
};

constexpr int kMaxImages = 30;
constexpr double kTermTol = 1e-17;

inline double safe_log_abs(Point p) { return 0.5 * std::log(std::norm(p)); }

// G in local coordinates, u = phi(z), v = phi(w)
double rect_green_uv(const RectMap& m, Point u, Point v) {
  const Point ub = std::conj(u);
  auto band = [&](double qk) {
    const Point vq = qk * v;
    const Point wq = qk / v;
    double t = 0.0;
    t += safe_log_abs(ub - vq) - safe_log_abs(u - vq);
    t += safe_log_abs(ub - wq) - safe_log_abs(u - wq);
    return t;
  };
  double total = band(1.0);
  for (int k = 1; k <= kMaxImages; ++k) {
    const double qk = std::pow(m.q, k);
    const double t1 = band(qk);
    const double t2 = band(1.0 / qk);
    if (!std::isfinite(t1) || !std::isfinite(t2)) break;
    total += t1 + t2;
    if (std::abs(t1) + std::abs(t2) < kTermTol) break;
  }
  return total;
}

double rect_green(const NiceDomain& D, Point x, Point y) {
  const RectMap m(D);
  return rect_green_uv(m, m.phi(m.local(x)), m.phi(m.local(y)));
}

// normal-derivative of G(x, .) at boundary point b along inward normal nb,
// all in local coordinates; yields 2 pi H(x, b).
// G = sum_k [ log|u - qk conj(v)| - log|u - qk v|
//             - log|u - qk/v| + log|u - qk/conj(v)| ]
// and d/de log|u - g(w+e n)| = Re[-dg / (u - g)] per family.
double rect_dG_dn(const RectMap& m, Point u, Point wl, Point nbl) {
  const Point v = m.phi(wl);
  const Point vn = Point(0, kPi / m.W) * v * nbl;  // phi'(w) n
  const Point vb = std::conj(v);
  const Point vnb = std::conj(vn);
  auto band = [&](double qk) {
    double t = 0.0;
    t += (-qk * vnb / (u - qk * vb)).real();
    t -= (-qk * vn / (u - qk * v)).real();
    t -= (qk * vn / (v * v) / (u - qk / v)).real();
    t += (qk * vnb / (vb * vb) / (u - qk / vb)).real();
    return t;
  };
  double total = band(1.0);
  for (int k = 1; k <= kMaxImages; ++k) {
    const double qk = std::pow(m.q, k);
    const double t1 = band(qk);
    const double t2 = band(1.0 / qk);
    if (!std::isfinite(t1) || !std::isfinite(t2)) break;
    total += t1 + t2;
    if (std::abs(t1) + std::abs(t2) < kTermTol) break;
  }
  return total;
}

double rect_poisson(const NiceDomain& D, Point x, Point b) {
  const RectMap m(D);
  const Point u = m.phi(m.local(x));
  const Point nb = m.dir(D.inward_normal(b));
  return rect_dG_dn(m, u, m.local(b), nb) / kTwoPi;
}

// mixed normal derivative d^2 G / dn_b dn_b' / (2 pi) = boundary Poisson
// kernel. Differentiating rect_dG_dn's Re[C/(u - X)] terms in z gives
// Re[-un C/(u - X)^2] per family.
double rect_bpk(const NiceDomain& D, Point b, Point bp) {
  const RectMap m(D);
  const Point zl = m.local(b), wl = m.local(bp);
  const Point nz = m.dir(D.inward_normal(b));
  const Point nw = m.dir(D.inward_normal(bp));
  const Point u = m.phi(zl), v = m.phi(wl);
  const Point un = Point(0, kPi / m.W) * u * nz;
  const Point vn = Point(0, kPi / m.W) * v * nw;
  const Point vb = std::conj(v);
  const Point vnb = std::conj(vn);
  auto band = [&](double qk) {
    double t = 0.0;
    {
      const Point F = u - qk * vb;
      t += (un * qk * vnb / (F * F)).real();
    }
    {
      const Point F = u - qk * v;
      t -= (un * qk * vn / (F * F)).real();
    }
    {
      const Point F = u - qk / v;
      t += (un * qk * vn / (v * v) / (F * F)).real();
    }
    {
      const Point F = u - qk / vb;
      t -= (un * qk * vnb / (vb * vb) / (F * F)).real();
    }
    return t;
  };
  double total = band(1.0);
  for (int k = 1; k <= kMaxImages; ++k) {
    const double qk = std::pow(m.q, k);
    const double t1 = band(qk);
    const double t2 = band(1.0 / qk);
    if (!std::isfinite(t1) || !std::isfinite(t2)) break;
    total += t1 + t2;
    if (std::abs(t1) + std::abs(t2) < kTermTol) break;
  }
  return total / kTwoPi;
}

double rect_regularized_limit(const NiceDomain& D, Point x) {
  const RectMap m(D);
  const Point u = m.phi(m.local(x));
  const Point ub = std::conj(u);
  const double abs_dphi = (kPi / m.W) * std::abs(u);
  double total = -std::log(abs_dphi) + safe_log_abs(ub - u);
  // remaining bands at v = u, excluding the singular k=0 direct term
  auto band0 = [&](double qk) {
    return safe_log_abs(ub - qk / u) - safe_log_abs(u - qk / u);
  };
  auto band = [&](double qk) {
    return safe_log_abs(ub - qk * u) - safe_log_abs(u - qk * u) + band0(qk);
  };
  total += band0(1.0);
  for (int k = 1; k <= kMaxImages; ++k) {
    const double qk = std::pow(m.q, k);
    const double t1 = band(qk);
    const double t2 = band(1.0 / qk);
    if (!std::isfinite(t1) || !std::isfinite(t2)) break;
    total += t1 + t2;
    if (std::abs(t1) + std::abs(t2) < kTermTol) break;
  }
  return total;
}

// gradient of G(x, .) in the second argument, local coordinates
Point rect_grad_green_local(const RectMap& m, Point u, Point wl) {
  const Point v = m.phi(wl);
  const Point vp = Point(0, kPi / m.W) * v;
  const Point ub = std::conj(u);
  auto band = [&](double qk) {
    Point g(0, 0);
    // + log|ub - qk v| : holo via v with constant ub: F = ub - qk v
    g += std::conj(-qk * vp / (ub - qk * v));
    // - log|u - qk v|
    g -= std::conj(-qk * vp / (u - qk * v));
    // - log|u - qk/v| : F_w = qk vp / v^2
    g -= std::conj(qk * vp / (v * v) / (u - qk / v));
    // + log|ub - qk/v|
    g += std::conj(qk * vp / (v * v) / (ub - qk / v));
    return g;
  };
  Point total = band(1.0);
  for (int k = 1; k <= kMaxImages; ++k) {
    const double qk = std::pow(m.q, k);
    const Point t1 = band(qk);
    const Point t2 = band(1.0 / qk);
    if (!finite(t1) || !finite(t2)) break;
    total += t1 + t2;
    if (std::abs(t1) + std::abs(t2) < kTermTol) break;
  }
  return total;
}

// ---------- Mobius image helpers ----------

struct PulledBack {
  const NiceDomain* base;
  Point z;
  double abs_dpsi;  // |Psi'| at the base preimage
};

PulledBack pull_back(const NiceDomain& D, Point p) {
  const NiceDomain& B = D.base();
  const Point c = (B.kind() == DomainKind::Disk) ? B.center() : Point(0, 0);
  const double r = (B.kind() == DomainKind::Disk) ? B.radius() : 1.0;
  const Point in_unit = D.map().inverse(p);
  const Point z = c + r * in_unit;
  const double dpsi = std::abs(D.map().derivative((z - c) / r)) / r;
  return {&B, z, dpsi};
}

}  // namespace

double transform_H(double h, PointClass class_z, PointClass class_zp,
                   double abs_dpsi_z, double abs_dpsi_zp) {
  if (class_z == PointClass::Outside || class_zp == PointClass::Outside)
    throw std::invalid_argument("transform_H: outside point");
  double f = 1.0;
  if (class_z == PointClass::Boundary) f /= abs_dpsi_z;
  if (class_zp == PointClass::Boundary) f /= abs_dpsi_zp;
  return h * f;
}

double green(const NiceDomain& D, Point x, Point y) {
  if (x == y) throw std::invalid_argument("green: x == y");
  switch (D.kind()) {
    case DomainKind::UnitDisk:
      if (!D.contains(x) || !D.contains(y))
        throw std::invalid_argument("green: point outside the domain");
      return green_unit(x, y);
    case DomainKind::Disk: {
      if (!D.contains(x) || !D.contains(y))
        throw std::invalid_argument("green: point outside the domain");
      const Point c = D.center();
      const double r = D.radius();
      return green_unit((x - c) / r, (y - c) / r);
    }
    case DomainKind::Rect:
      if (!D.contains(x) || !D.contains(y))
        throw std::invalid_argument("green: point outside the domain");
      return rect_green(D, x, y);
    case DomainKind::MobiusImage: {
      const auto px = pull_back(D, x);
      const auto py = pull_back(D, y);
      return green(*px.base, px.z, py.z);
    }
  }
  throw std::logic_error("green: unreachable");
}

double poisson_kernel(const NiceDomain& D, Point x, Point b) {
  if (D.classify(x) != PointClass::Interior)
    throw std::invalid_argument("poisson_kernel: x must be interior");
  if (D.classify(b) != PointClass::Boundary)
    throw std::invalid_argument("poisson_kernel: b must be on the boundary");
  switch (D.kind()) {
    case DomainKind::UnitDisk:
      return poisson_unit(x, b / std::abs(b));
    case DomainKind::Disk: {
      const Point c = D.center();
      const double r = D.radius();
      const Point bu = (b - c) / std::abs(b - c);
      return poisson_unit((x - c) / r, bu) / r;
    }
    case DomainKind::Rect:
      return rect_poisson(D, x, b);
    case DomainKind::MobiusImage: {
      const auto px = pull_back(D, x);
      const auto pb = pull_back(D, b);
      return poisson_kernel(*px.base, px.z, pb.z) / pb.abs_dpsi;
    }
  }
  throw std::logic_error("poisson_kernel: unreachable");
}

double boundary_poisson_kernel(const NiceDomain& D, Point b, Point bp) {
  if (D.classify(b) != PointClass::Boundary ||
      D.classify(bp) != PointClass::Boundary)
    throw std::invalid_argument("boundary_poisson_kernel: boundary points only");
  if (b == bp) throw std::invalid_argument("boundary_poisson_kernel: b == b'");
  switch (D.kind()) {
    case DomainKind::UnitDisk:
      return bpk_unit(b / std::abs(b), bp / std::abs(bp));
    case DomainKind::Disk: {
      const Point c = D.center();
      const double r = D.radius();
      return bpk_unit((b - c) / std::abs(b - c), (bp - c) / std::abs(bp - c)) /
             (r * r);
    }
    case DomainKind::Rect:
      return rect_bpk(D, b, bp);
    case DomainKind::MobiusImage: {
      const auto pb = pull_back(D, b);
      const auto pq = pull_back(D, bp);
      return boundary_poisson_kernel(*pb.base, pb.z, pq.z) /
             (pb.abs_dpsi * pq.abs_dpsi);
    }
  }
  throw std::logic_error("boundary_poisson_kernel: unreachable");
}

KernelValue kernel_H_value(const NiceDomain& D, Point z, Point zp) {
  const PointClass cz = D.classify(z);
  const PointClass czp = D.classify(zp);
  if (cz == PointClass::Outside || czp == PointClass::Outside)
    throw std::invalid_argument("kernel_H: point outside the closure");
  KernelValue kv;
  if (cz == PointClass::Interior && czp == PointClass::Interior) {
    kv.regime = KernelRegime::InteriorInterior;
    kv.value = green(D, z, zp) / kTwoPi;
  } else if (cz == PointClass::Boundary && czp == PointClass::Boundary) {
    kv.regime = KernelRegime::BoundaryBoundary;
    kv.value = boundary_poisson_kernel(D, z, zp);
  } else {
    kv.regime = KernelRegime::InteriorBoundary;
    kv.value = (cz == PointClass::Interior) ? poisson_kernel(D, z, zp)
                                            : poisson_kernel(D, zp, z);
  }
  return kv;
}

double kernel_H(const NiceDomain& D, Point z, Point zp) {
  return kernel_H_value(D, z, zp).value;
}

double xi(const NiceDomain& D, Point x, Point z, Point zp) {
  if (z == zp) throw std::invalid_argument("xi: z == z'");
  if (x == z || x == zp) throw std::invalid_argument("xi: z or z' equals x");
  if (D.classify(x) != PointClass::Interior)
    throw std::invalid_argument("xi: x must be interior");
  return kTwoPi * kernel_H(D, x, z) * kernel_H(D, x, zp) / kernel_H(D, z, zp);
}

double regularized_green_limit(const NiceDomain& S, Point x) {
  if (S.classify(x) != PointClass::Interior)
    throw std::invalid_argument("capacity: x must be interior");
  switch (S.kind()) {
    case DomainKind::UnitDisk:
    case DomainKind::Disk:
    case DomainKind::MobiusImage: {
      if (S.kind() == DomainKind::MobiusImage) {
        // same point set as the unit disk; conformal radius is intrinsic
        return std::log(1.0 - std::norm(x));
      }
      return std::log(conformal_radius(S, x));
    }
    case DomainKind::Rect:
      return rect_regularized_limit(S, x);
  }
  throw std::logic_error("regularized_green_limit: unreachable");
}

double capacity(const NiceDomain& S, Point x) {
  return -regularized_green_limit(S, x);
}

double capacity_gap(const NiceDomain& D, const NiceDomain& D1, Point x) {
  if (D1.classify(x) != PointClass::Interior)
    throw std::invalid_argument("capacity_gap: x must lie in D1");
  return capacity(D1, x) - capacity(D, x);
}

Point grad_log_green_target(const NiceDomain& D, Point target, Point w) {
  switch (D.kind()) {
    case DomainKind::UnitDisk:
    case DomainKind::Disk: {
      const Point c = (D.kind() == DomainKind::Disk) ? D.center() : Point(0, 0);
      const double r = (D.kind() == DomainKind::Disk) ? D.radius() : 1.0;
      const Point t = (target - c) / r, u = (w - c) / r;
      const double g = green_unit(t, u);
      const Point grad =
          std::conj(-1.0 / (u - t) - std::conj(t) / (1.0 - std::conj(t) * u));
      return grad / (g * r);
    }
    case DomainKind::Rect: {
      const RectMap m(D);
      const Point ut = m.phi(m.local(target));
      const Point wl = m.local(w);
      const double g = rect_green_uv(m, ut, m.phi(wl));
      const Point gl = rect_grad_green_local(m, ut, wl) / g;
      return m.dir(gl);  // the swap transform is its own inverse
    }
    default:
      throw std::invalid_argument("grad_log_green_target: unsupported domain");
  }
}

Point grad_log_H_to_boundary(const NiceDomain& D, Point w, Point b) {
  switch (D.kind()) {
    case DomainKind::UnitDisk:
    case DomainKind::Disk: {
      const Point c = (D.kind() == DomainKind::Disk) ? D.center() : Point(0, 0);
      const double r = (D.kind() == DomainKind::Disk) ? D.radius() : 1.0;
      const Point u = (w - c) / r;
      const Point bu = (b - c) / std::abs(b - c);
      const Point grad =
          -2.0 * u / (1.0 - std::norm(u)) - 2.0 * (u - bu) / std::norm(u - bu);
      return grad / r;
    }
    case DomainKind::Rect: {
      const double h = 1e-6;
      auto lh = [&](Point p) { return std::log(rect_poisson(D, p, b)); };
      const double gx = (lh(w + Point(h, 0)) - lh(w - Point(h, 0))) / (2 * h);
      const double gy = (lh(w + Point(0, h)) - lh(w - Point(0, h))) / (2 * h);
      return Point(gx, gy);
    }
    default:
      throw std::invalid_argument("grad_log_H_to_boundary: unsupported domain");
  }
}

double poisson_kernel_boundary_integral(const NiceDomain& D, Point x, int n) {
  const auto q = D.boundary_quadrature(n);
  double s = 0.0;
  for (std::size_t i = 0; i < q.points.size(); ++i)
    s += q.weights[i] * poisson_kernel(D, x, q.points[i]);
  return s;
}

}  // namespace thickpoints
