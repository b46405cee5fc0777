#include "thickpoints/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace thickpoints {

using nlohmann::json;

MobiusMap::MobiusMap(Point a_, Point rotation_) : a(a_), rotation(rotation_) {
  if (std::abs(a) >= 1.0) throw std::invalid_argument("MobiusMap: |a| >= 1");
  const double r = std::abs(rotation);
  if (std::abs(r - 1.0) > 1e-9)
    throw std::invalid_argument("MobiusMap: |rotation| != 1");
  rotation /= r;  // renormalize drift
}

Point MobiusMap::map(Point w) const {
  return rotation * (w - a) / (1.0 - std::conj(a) * w);
}

Point MobiusMap::inverse(Point w) const {
  const Point v = w / rotation;
  return (v + a) / (1.0 + std::conj(a) * v);
}

Point MobiusMap::derivative(Point w) const {
  const Point d = 1.0 - std::conj(a) * w;
  return rotation * (1.0 - std::norm(a)) / (d * d);
}

MobiusMap MobiusMap::inverted() const {
  // inverse of w -> rot*(w-a)/(1-conj(a)w) is another disk automorphism
  MobiusMap m;
  m.a = -rotation * a;
  m.rotation = 1.0 / rotation;
  return m;
}

NiceDomain NiceDomain::unit_disk() {
  NiceDomain d;
  d.kind_ = DomainKind::UnitDisk;
  d.center_ = Point(0, 0);
  d.radius_ = 1.0;
  return d;
}

NiceDomain NiceDomain::disk(Point center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disk: radius <= 0");
  NiceDomain d;
  d.kind_ = DomainKind::Disk;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

NiceDomain NiceDomain::rect(double x0, double y0, double x1, double y1) {
  if (!(x0 < x1 && y0 < y1)) throw std::invalid_argument("rect: empty");
  NiceDomain d;
  d.kind_ = DomainKind::Rect;
  d.x0_ = x0;
  d.y0_ = y0;
  d.x1_ = x1;
  d.y1_ = y1;
  return d;
}

NiceDomain NiceDomain::mobius_image(const NiceDomain& base, const MobiusMap& map) {
  if (!base.is_disk_like() || base.kind_ == DomainKind::MobiusImage)
    throw std::invalid_argument("mobius_image: base must be UnitDisk or Disk");
  NiceDomain d;
  d.kind_ = DomainKind::MobiusImage;
  d.base_ = std::make_shared<NiceDomain>(base);
  d.map_ = map;
  // image of a disk under a disk automorphism composed with the affine
  // normalization is the unit disk as a set
  d.center_ = Point(0, 0);
  d.radius_ = 1.0;
  return d;
}

const NiceDomain& NiceDomain::base() const {
  if (!base_) throw std::logic_error("base(): not a MobiusImage");
  return *base_;
}

bool NiceDomain::contains(Point p) const {
  switch (kind_) {
    case DomainKind::UnitDisk:
      return std::norm(p) < 1.0;
    case DomainKind::Disk:
      return std::norm(p - center_) < radius_ * radius_;
    case DomainKind::Rect:
      return p.real() > x0_ && p.real() < x1_ && p.imag() > y0_ && p.imag() < y1_;
    case DomainKind::MobiusImage:
      return std::norm(p) < 1.0;
  }
  return false;
}

double NiceDomain::boundary_distance(Point p) const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::MobiusImage:
      return 1.0 - std::abs(p);
    case DomainKind::Disk:
      return radius_ - std::abs(p - center_);
    case DomainKind::Rect: {
      const double dx = std::min(p.real() - x0_, x1_ - p.real());
      const double dy = std::min(p.imag() - y0_, y1_ - p.imag());
      if (dx >= 0 && dy >= 0) return std::min(dx, dy);
      // outside: negative euclidean distance to the box
      const double ox = std::max({x0_ - p.real(), 0.0, p.real() - x1_});
      const double oy = std::max({y0_ - p.imag(), 0.0, p.imag() - y1_});
      return -std::hypot(ox, oy);
    }
  }
  return 0.0;
}

PointClass NiceDomain::classify(Point p, double tol) const {
  const double d = boundary_distance(p);
  if (std::abs(d) <= tol * std::max(1.0, diameter())) return PointClass::Boundary;
  return d > 0 ? PointClass::Interior : PointClass::Outside;
}

Point NiceDomain::inward_normal(Point b) const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::MobiusImage:
      return -b / std::abs(b);
    case DomainKind::Disk: {
      const Point r = b - center_;
      return -r / std::abs(r);
    }
    case DomainKind::Rect: {
      // nearest edge wins; corners are not nice points
      const double dl = b.real() - x0_, dr = x1_ - b.real();
      const double db = b.imag() - y0_, dt = y1_ - b.imag();
      const double m = std::min({std::abs(dl), std::abs(dr), std::abs(db),
                                 std::abs(dt)});
      if (m == std::abs(dl)) return Point(1, 0);
      if (m == std::abs(dr)) return Point(-1, 0);
      if (m == std::abs(db)) return Point(0, 1);
      return Point(0, -1);
    }
  }
  return Point(0, 0);
}

Point NiceDomain::project_to_boundary(Point p) const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::MobiusImage:
      return p / std::abs(p);
    case DomainKind::Disk:
      return center_ + radius_ * (p - center_) / std::abs(p - center_);
    case DomainKind::Rect: {
      const double dl = p.real() - x0_, dr = x1_ - p.real();
      const double db = p.imag() - y0_, dt = y1_ - p.imag();
      const double m = std::min({dl, dr, db, dt});
      Point q = p;
      if (m == dl) q.real(x0_);
      else if (m == dr) q.real(x1_);
      else if (m == db) q.imag(y0_);
      else q.imag(y1_);
      q = Point(std::clamp(q.real(), x0_, x1_), std::clamp(q.imag(), y0_, y1_));
      return q;
    }
  }
  return p;
}

double NiceDomain::diameter() const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::MobiusImage:
      return 2.0;
    case DomainKind::Disk:
      return 2.0 * radius_;
    case DomainKind::Rect:
      return std::hypot(x1_ - x0_, y1_ - y0_);
  }
  return 0.0;
}

double NiceDomain::area() const {
  switch (kind_) {
    case DomainKind::UnitDisk:
    case DomainKind::MobiusImage:
      return kPi;
    case DomainKind::Disk:
      return kPi * radius_ * radius_;
    case DomainKind::Rect:
      return (x1_ - x0_) * (y1_ - y0_);
  }
  return 0.0;
}

NiceDomain::BoundaryQuad NiceDomain::boundary_quadrature(int n) const {
  BoundaryQuad q;
  if (is_disk_like()) {
    // periodic trapezoid: spectrally accurate for smooth integrands
    const Point c = (kind_ == DomainKind::Disk) ? center_ : Point(0, 0);
    const double r = (kind_ == DomainKind::Disk) ? radius_ : 1.0;
    const double w = kTwoPi * r / n;
    for (int i = 0; i < n; ++i) {
      const double th = kTwoPi * (i + 0.5) / n;
      const Point b = c + r * Point(std::cos(th), std::sin(th));
      q.points.push_back(b);
      q.normals.push_back(inward_normal(b));
      q.weights.push_back(w);
    }
    return q;
  }
  // rectangle: Gauss-Legendre 8-point panels per edge
  static const double gl_x[8] = {-0.9602898564975362, -0.7966664774136267,
                                 -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975362};
  static const double gl_w[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
  const double W = x1_ - x0_, H = y1_ - y0_;
  const double per = 2 * (W + H);
  const int panels = std::max(4, n / 8);
  struct Edge { Point from, dir, nrm; double len; };
  const Edge edges[4] = {
      {Point(x0_, y0_), Point(1, 0), Point(0, 1), W},
      {Point(x1_, y0_), Point(0, 1), Point(-1, 0), H},
      {Point(x1_, y1_), Point(-1, 0), Point(0, -1), W},
      {Point(x0_, y1_), Point(0, -1), Point(1, 0), H},
  };
  for (const auto& e : edges) {
    const int np = std::max(1, static_cast<int>(std::round(panels * e.len / per)));
    const double plen = e.len / np;
    for (int p = 0; p < np; ++p) {
      for (int g = 0; g < 8; ++g) {
        const double s = (p + 0.5 * (1.0 + gl_x[g])) * plen;
        q.points.push_back(e.from + s * e.dir);
        q.normals.push_back(e.nrm);
        q.weights.push_back(0.5 * plen * gl_w[g]);
      }
    }
  }
  return q;
}

std::optional<std::pair<double, Point>> NiceDomain::segment_boundary_hit(
    Point a, Point b) const {
  if (is_disk_like() || kind_ == DomainKind::Disk) {
    const Point c = (kind_ == DomainKind::Disk) ? center_ : Point(0, 0);
    const double r = (kind_ == DomainKind::Disk) ? radius_ : 1.0;
    const Point d = b - a, f = a - c;
    const double A = std::norm(d);
    if (A == 0.0) return std::nullopt;
    const double B = 2.0 * (f.real() * d.real() + f.imag() * d.imag());
    const double C = std::norm(f) - r * r;
    const double disc = B * B - 4 * A * C;
    if (disc < 0) return std::nullopt;
    const double sd = std::sqrt(disc);
    for (double t : {(-B - sd) / (2 * A), (-B + sd) / (2 * A)}) {
      if (t > 1e-14 && t <= 1.0) return std::make_pair(t, a + t * d);
    }
    return std::nullopt;
  }
  // rectangle: first crossing of any of the four lines within the segment
  double best = 2.0;
  Point hit;
  const Point d = b - a;
  auto try_line = [&](double t, bool vertical, double coord) {
    if (t <= 1e-14 || t > 1.0 || t >= best) return;
    const Point p = a + t * d;
    if (vertical) {
      if (p.imag() >= y0_ - 1e-14 && p.imag() <= y1_ + 1e-14) {
        best = t;
        hit = Point(coord, std::clamp(p.imag(), y0_, y1_));
      }
    } else {
      if (p.real() >= x0_ - 1e-14 && p.real() <= x1_ + 1e-14) {
        best = t;
        hit = Point(std::clamp(p.real(), x0_, x1_), coord);
      }
    }
  };
  if (d.real() != 0) {
    try_line((x0_ - a.real()) / d.real(), true, x0_);
    try_line((x1_ - a.real()) / d.real(), true, x1_);
  }
  if (d.imag() != 0) {
    try_line((y0_ - a.imag()) / d.imag(), false, y0_);
    try_line((y1_ - a.imag()) / d.imag(), false, y1_);
  }
  if (best <= 1.0) return std::make_pair(best, hit);
  return std::nullopt;
}

std::vector<std::pair<double, Point>> NiceDomain::boundary_crossings(
    Point a, Point b) const {
  std::vector<std::pair<double, Point>> out;
  const Point d = b - a;
  if (is_disk_like() || kind_ == DomainKind::Disk) {
    const Point c = (kind_ == DomainKind::Disk) ? center_ : Point(0, 0);
    const double r = (kind_ == DomainKind::Disk) ? radius_ : 1.0;
    const double A = std::norm(d);
    if (A == 0.0) return out;
    const Point f = a - c;
    const double B = 2.0 * (f.real() * d.real() + f.imag() * d.imag());
    const double C = std::norm(f) - r * r;
    const double disc = B * B - 4 * A * C;
    if (disc < 0) return out;
    const double sd = std::sqrt(disc);
    for (double t : {(-B - sd) / (2 * A), (-B + sd) / (2 * A)})
      if (t > 1e-14 && t <= 1.0) out.emplace_back(t, a + t * d);
  } else {
    auto try_line = [&](double t, bool vertical, double coord) {
      if (t <= 1e-14 || t > 1.0) return;
      const Point p = a + t * d;
      if (vertical) {
        if (p.imag() >= y0_ - 1e-14 && p.imag() <= y1_ + 1e-14)
          out.emplace_back(t, Point(coord, std::clamp(p.imag(), y0_, y1_)));
      } else {
        if (p.real() >= x0_ - 1e-14 && p.real() <= x1_ + 1e-14)
          out.emplace_back(t, Point(std::clamp(p.real(), x0_, x1_), coord));
      }
    };
    if (d.real() != 0) {
      try_line((x0_ - a.real()) / d.real(), true, x0_);
      try_line((x1_ - a.real()) / d.real(), true, x1_);
    }
    if (d.imag() != 0) {
      try_line((y0_ - a.imag()) / d.imag(), false, y0_);
      try_line((y1_ - a.imag()) / d.imag(), false, y1_);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });
    // keep genuine inside/outside flips: drop crossings of a line outside the
    // box edge (the clamp above may have produced duplicates)
    std::vector<std::pair<double, Point>> filtered;
    bool inside = contains(a);
    for (const auto& cr : out) {
      const Point just_after = a + std::min(1.0, cr.first + 1e-12) * d;
      const bool now_inside = contains(just_after);
      if (now_inside != inside) {
        filtered.push_back(cr);
        inside = now_inside;
      }
    }
    return filtered;
  }
  return out;
}

std::string NiceDomain::to_json() const {
  json j;
  switch (kind_) {
    case DomainKind::UnitDisk:
      j["kind"] = "unit_disk";
      break;
    case DomainKind::Disk:
      j["kind"] = "disk";
      j["center"] = {center_.real(), center_.imag()};
      j["radius"] = radius_;
      break;
    case DomainKind::Rect:
      j["kind"] = "rect";
      j["x0"] = x0_;
      j["y0"] = y0_;
      j["x1"] = x1_;
      j["y1"] = y1_;
      break;
    case DomainKind::MobiusImage:
      j["kind"] = "mobius_image";
      j["base"] = json::parse(base_->to_json());
      j["a"] = {map_.a.real(), map_.a.imag()};
      j["rotation"] = {map_.rotation.real(), map_.rotation.imag()};
      break;
  }
  return j.dump();
}

NiceDomain NiceDomain::from_json(const std::string& text) {
  const json j = json::parse(text);
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "unit_disk") return unit_disk();
  if (kind == "disk") {
    const auto c = j.at("center");
    return disk(Point(c[0].get<double>(), c[1].get<double>()),
                j.at("radius").get<double>());
  }
  if (kind == "rect")
    return rect(j.at("x0").get<double>(), j.at("y0").get<double>(),
                j.at("x1").get<double>(), j.at("y1").get<double>());
  if (kind == "mobius_image") {
    const NiceDomain base = from_json(j.at("base").dump());
    const auto a = j.at("a");
    const auto r = j.at("rotation");
    return mobius_image(base,
                        MobiusMap(Point(a[0].get<double>(), a[1].get<double>()),
                                  Point(r[0].get<double>(), r[1].get<double>())));
  }
  throw ConfigError("unknown domain kind: " + kind);
}

MobiusMap mobius_to_origin(const NiceDomain& d, Point x) {
  if (d.kind() == DomainKind::Rect)
    throw std::invalid_argument("mobius_to_origin: disk-like domains only");
  if (d.classify(x) != PointClass::Interior)
    throw std::invalid_argument("mobius_to_origin: x must be interior");
  if (d.kind() == DomainKind::MobiusImage) {
    // compose with the normalizing map of the base
    throw std::invalid_argument("mobius_to_origin: pass the base domain");
  }
  const Point c = (d.kind() == DomainKind::Disk) ? d.center() : Point(0, 0);
  const double r = (d.kind() == DomainKind::Disk) ? d.radius() : 1.0;
  const Point a = (x - c) / r;  // position in the unit disk
  return MobiusMap(a, Point(1.0, 0.0));
}

double conformal_radius(const NiceDomain& d, Point x) {
  // 1/|Phi'(x)| for Phi : D -> unit disk, Phi(x) = 0
  if (d.kind() == DomainKind::Rect)
    throw std::invalid_argument("conformal_radius: disk-like domains only");
  const Point c = (d.kind() == DomainKind::Disk) ? d.center() : Point(0, 0);
  const double r = (d.kind() == DomainKind::Disk) ? d.radius() : 1.0;
  const double rho2 = std::norm((x - c) / r);
  if (rho2 >= 1.0)
    throw std::invalid_argument("conformal_radius: x not interior");
  // |Phi'| = (1/r) * 1/(1-|a|^2)
  return r * (1.0 - rho2);
}

// --- grids -------------------------------------------------------------

GridPartition grid_partition(const NiceDomain& domain, int n, Point offset,
                             long max_cells) {
  if (n < 0) throw std::invalid_argument("grid_partition: n < 0");
  if (domain.kind() == DomainKind::MobiusImage)
    throw std::invalid_argument("grid_partition: Disk or Rect domains only");
  GridPartition p;
  p.level = n;
  p.domain = domain;
  p.offset = offset;
  const double mesh = std::ldexp(1.0, -n);

  double bx0, by0, bx1, by1;
  if (domain.kind() == DomainKind::Rect) {
    bx0 = domain.x0(); by0 = domain.y0();
    bx1 = domain.x1(); by1 = domain.y1();
  } else {
    const Point c = domain.center();
    const double r = domain.radius();
    bx0 = c.real() - r; by0 = c.imag() - r;
    bx1 = c.real() + r; by1 = c.imag() + r;
  }
  const long ix0 = static_cast<long>(std::floor((bx0 - offset.real()) / mesh));
  const long ix1 = static_cast<long>(std::floor((bx1 - offset.real()) / mesh)) + 1;
  const long iy0 = static_cast<long>(std::floor((by0 - offset.imag()) / mesh));
  const long iy1 = static_cast<long>(std::floor((by1 - offset.imag()) / mesh)) + 1;
  if ((ix1 - ix0) * (iy1 - iy0) > max_cells)
    throw ConfigError("grid_partition: cell count exceeds limit");

  for (long iy = iy0; iy <= iy1; ++iy) {
    for (long ix = ix0; ix <= ix1; ++ix) {
      Cell c;
      c.level = n;
      c.ix = ix;
      c.iy = iy;
      c.x0 = offset.real() + ix * mesh;
      c.y0 = offset.imag() + iy * mesh;
      c.x1 = c.x0 + mesh;
      c.y1 = c.y0 + mesh;
      // clip against the domain box
      const double cx0 = std::max(c.x0, bx0), cy0 = std::max(c.y0, by0);
      const double cx1 = std::min(c.x1, bx1), cy1 = std::min(c.y1, by1);
      if (cx0 >= cx1 || cy0 >= cy1) continue;
      if (domain.kind() == DomainKind::Rect) {
        const bool full = c.x0 >= bx0 - 1e-15 && c.x1 <= bx1 + 1e-15 &&
                          c.y0 >= by0 - 1e-15 && c.y1 <= by1 + 1e-15;
        c.square = full;
        if (!full) {
          // clipped cells of a rectangle are smaller rectangles
          c.x0 = cx0; c.y0 = cy0; c.x1 = cx1; c.y1 = cy1;
        }
        p.cells.push_back(c);
      } else {
        // keep cells meeting the disk; full squares are those inside it
        const Point ctr = domain.center();
        const double r2 = sq(domain.radius());
        auto inside = [&](double x, double y) {
          return sq(x - ctr.real()) + sq(y - ctr.imag()) < r2;
        };
        const bool corners_in = inside(c.x0, c.y0) && inside(c.x0, c.y1) &&
                                inside(c.x1, c.y0) && inside(c.x1, c.y1);
        if (corners_in) {
          c.square = true;
          p.cells.push_back(c);
        } else {
          // does the square meet the disk at all?
          const double nx = std::clamp(ctr.real(), c.x0, c.x1);
          const double ny = std::clamp(ctr.imag(), c.y0, c.y1);
          if (sq(nx - ctr.real()) + sq(ny - ctr.imag()) < r2) {
            c.square = false;
            p.cells.push_back(c);
          }
        }
      }
    }
  }
  return p;
}

std::optional<Cell> cell_of(const GridPartition& p, Point x) {
  if (!p.domain.contains(x)) return std::nullopt;
  const double mesh = p.mesh();
  const double fx = (x.real() - p.offset.real()) / mesh;
  const double fy = (x.imag() - p.offset.imag()) / mesh;
  const double tol = 1e-12 * std::max(1.0, std::abs(fx) + std::abs(fy));
  if (std::abs(fx - std::round(fx)) < tol) return std::nullopt;  // on a line
  if (std::abs(fy - std::round(fy)) < tol) return std::nullopt;
  const long ix = static_cast<long>(std::floor(fx));
  const long iy = static_cast<long>(std::floor(fy));
  // cells are generated in (iy, ix) row-major order
  const auto it = std::lower_bound(
      p.cells.begin(), p.cells.end(), std::make_pair(iy, ix),
      [](const Cell& c, const std::pair<long, long>& key) {
        return std::make_pair(c.iy, c.ix) < key;
      });
  if (it != p.cells.end() && it->ix == ix && it->iy == iy) {
    if (x.real() > it->x0 && x.real() < it->x1 && x.imag() > it->y0 &&
        x.imag() < it->y1)
      return *it;
  }
  return std::nullopt;
}

bool is_suitable(Point x, const NiceDomain& domain, Point z, Point zp,
                 int n_max, Point offset) {
  if (x == z || x == zp) return false;
  if (!domain.contains(x)) return false;
  const auto on_line = [&](int n) {
    const double mesh = std::ldexp(1.0, -n);
    const double fx = (x.real() - offset.real()) / mesh;
    const double fy = (x.imag() - offset.imag()) / mesh;
    const double tol = 1e-12 * std::max(1.0, std::abs(fx) + std::abs(fy));
    return std::abs(fx - std::round(fx)) < tol ||
           std::abs(fy - std::round(fy)) < tol;
  };
  for (int n = 0; n <= n_max; ++n)
    if (on_line(n)) return false;
  return true;
}

bool junction_boundary(const NiceDomain& D, const NiceDomain& D1, Point z) {
  if (!D.is_boundary(z))
    throw std::invalid_argument("junction_boundary: z not on the boundary of D");
  if (!D1.is_boundary(z)) return false;
  // local identity D cap B(z,r) == D1 cap B(z,r), probed on a small disk
  const double r = 1e-4 * std::min(D.diameter(), D1.diameter());
  for (int i = 0; i < 64; ++i) {
    const double th = kTwoPi * i / 64.0;
    for (double rho : {0.25 * r, 0.6 * r, r}) {
      const Point p = z + rho * Point(std::cos(th), std::sin(th));
      if (D.contains(p) != D1.contains(p)) return false;
    }
  }
  return true;
}

double clipped_cell_area(const NiceDomain& domain, double x0, double y0,
                         double x1, double y1) {
  if (domain.kind() == DomainKind::Rect) {
    const double w = std::max(0.0, std::min(x1, domain.x1()) - std::max(x0, domain.x0()));
    const double h = std::max(0.0, std::min(y1, domain.y1()) - std::max(y0, domain.y0()));
    return w * h;
  }
  // disk: integrate the chord overlap in x by adaptive Simpson
  const Point c = domain.center();
  const double r = domain.radius();
  auto overlap = [&](double x) {
    const double dx = x - c.real();
    if (std::abs(dx) >= r) return 0.0;
    const double half = std::sqrt(r * r - dx * dx);
    return std::max(0.0, std::min(y1, c.imag() + half) -
                             std::max(y0, c.imag() - half));
  };
  const double lo = std::max(x0, c.real() - r), hi = std::min(x1, c.real() + r);
  if (lo >= hi) return 0.0;
  const int n = 512;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = lo + (hi - lo) * i / n;
    const double b = lo + (hi - lo) * (i + 1) / n;
    s += (b - a) / 6.0 * (overlap(a) + 4.0 * overlap(0.5 * (a + b)) + overlap(b));
  }
  return s;
}

}  // namespace thickpoints
