#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "thickpoints/common.hpp"

namespace thickpoints {

// Disk automorphism w -> rotation * (w - a) / (1 - conj(a) w).
struct MobiusMap {
  Point a{0.0, 0.0};
  Point rotation{1.0, 0.0};

  MobiusMap() = default;
  MobiusMap(Point a_, Point rotation_);

  Point map(Point w) const;
  Point inverse(Point w) const;
  Point derivative(Point w) const;  // complex derivative of map at w
  MobiusMap inverted() const;

  static MobiusMap identity() { return MobiusMap(); }
};

enum class DomainKind { UnitDisk, Disk, Rect, MobiusImage };

enum class PointClass { Interior, Boundary, Outside };

// Disks, axis-aligned rectangles and Mobius images of disks. Value type.
class NiceDomain {
 public:
  static NiceDomain unit_disk();
  static NiceDomain disk(Point center, double radius);
  static NiceDomain rect(double x0, double y0, double x1, double y1);
  static NiceDomain mobius_image(const NiceDomain& base, const MobiusMap& map);

  DomainKind kind() const { return kind_; }
  Point center() const { return center_; }
  double radius() const { return radius_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double x1() const { return x1_; }
  double y1() const { return y1_; }
  const NiceDomain& base() const;
  const MobiusMap& map() const { return map_; }

  bool contains(Point p) const;  // open interior
  PointClass classify(Point p, double tol = 1e-9) const;
  bool is_boundary(Point p, double tol = 1e-9) const {
    return classify(p, tol) == PointClass::Boundary;
  }
  // positive inside, negative outside
  double boundary_distance(Point p) const;
  Point inward_normal(Point b) const;
  Point project_to_boundary(Point p) const;
  double diameter() const;
  double area() const;

  // boundary quadrature nodes with weights (arc-length measure) and inward
  // normals; n is the total node count
  struct BoundaryQuad {
    std::vector<Point> points;
    std::vector<Point> normals;
    std::vector<double> weights;
  };
  BoundaryQuad boundary_quadrature(int n) const;

  // first intersection of the segment a->b (a inside) with the boundary;
  // returns parameter t in (0,1] and the point
  std::optional<std::pair<double, Point>> segment_boundary_hit(Point a,
                                                               Point b) const;

  // all boundary crossings of the segment a->b in ascending parameter order
  std::vector<std::pair<double, Point>> boundary_crossings(Point a,
                                                           Point b) const;

  std::string to_json() const;
  static NiceDomain from_json(const std::string& json_text);

  bool is_disk_like() const {
    return kind_ == DomainKind::UnitDisk || kind_ == DomainKind::Disk ||
           kind_ == DomainKind::MobiusImage;
  }

 private:
  NiceDomain() = default;
  DomainKind kind_ = DomainKind::UnitDisk;
  Point center_{0.0, 0.0};
  double radius_ = 1.0;
  double x0_ = 0, y0_ = 0, x1_ = 0, y1_ = 0;
  std::shared_ptr<const NiceDomain> base_;
  MobiusMap map_;
};

// Conformal map from a disk-like domain onto the unit disk sending x to 0,
// with positive derivative at x. Throws if x is not interior.
MobiusMap mobius_to_origin(const NiceDomain& d, Point x);
// |Phi'(x)| for that map; conformal radius is its reciprocal.
double conformal_radius(const NiceDomain& d, Point x);

// --- grids -----------------------------------------------------------------

struct Cell {
  int level = 0;
  long ix = 0, iy = 0;     // integer grid index
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // bounding square
  bool square = true;      // false for boundary-clipped regions
};

struct GridPartition {
  int level = 0;
  NiceDomain domain = NiceDomain::unit_disk();
  Point offset{0.0, 0.0};
  std::vector<Cell> cells;
  double mesh() const { return std::ldexp(1.0, -level); }
};

// Connected components of domain minus the (offset) grid of mesh 2^-n.
// Throws ConfigError when the cell count would exceed the guard.
GridPartition grid_partition(const NiceDomain& domain, int n,
                             Point offset = Point(0.0, 0.0),
                             long max_cells = 1 << 22);

// Cell containing x, or nullopt when x lies on a grid line (or outside).
std::optional<Cell> cell_of(const GridPartition& p, Point x);

// x lies strictly inside a cell at every level <= n_max and differs from z, z'.
bool is_suitable(Point x, const NiceDomain& domain, Point z, Point zp,
                 int n_max, Point offset = Point(0.0, 0.0));

// Membership in the junction region J(D, D1) of boundary points shared by D
// and D1 with locally identical domains. Throws if z is not a boundary point
// of D. Used to validate experiment configurations.
bool junction_boundary(const NiceDomain& D, const NiceDomain& D1, Point z);

// area of the intersection of an axis-aligned box with the domain
double clipped_cell_area(const NiceDomain& domain, double x0, double y0,
                         double x1, double y1);

}  // namespace thickpoints
