#include "thickpoints/measurefield.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "thickpoints/weights.hpp"

namespace thickpoints {

namespace {

// 4-point Gauss-Legendre on [-1, 1]
constexpr double kGlX[4] = {-0.8611363115940526, -0.3399810435848563,
                            0.3399810435848563, 0.8611363115940526};
constexpr double kGlW[4] = {0.3478548451374538, 0.6521451548625461,
                            0.6521451548625461, 0.3478548451374538};

struct CellIndexer {
  double ox, oy, mesh;
  long key(long ix, long iy) const { return (ix + (1L << 28)) * (1L << 30) + (iy + (1L << 28)); }
  std::pair<long, long> of(Point p) const {
    return {static_cast<long>(std::floor((p.real() - ox) / mesh)),
            static_cast<long>(std::floor((p.imag() - oy) / mesh))};
  }
};

}  // namespace

double MeasureField::total_mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i)
    if (!clipped[i]) s += masses[i];
  return s;
}

double MeasureField::mass_in_rect(double x0, double y0, double x1,
                                  double y1) const {
  const double tol = 1e-9;
  double s = 0.0;
  for (std::size_t i = 0; i < partition.cells.size(); ++i) {
    const auto& c = partition.cells[i];
    const bool in = c.x0 >= x0 - tol && c.x1 <= x1 + tol && c.y0 >= y0 - tol &&
                    c.y1 <= y1 + tol;
    if (!in) {
      // cells must not straddle the rectangle
      const bool out = c.x1 <= x0 + tol || c.x0 >= x1 - tol ||
                       c.y1 <= y0 + tol || c.y0 >= y1 - tol;
      if (!out)
        throw std::invalid_argument("mass_in_rect: rectangle not cell-aligned");
      continue;
    }
    s += masses[i];
  }
  return s;
}

CellRecords collect_cell_records(const PathSample& path,
                                 const GridPartition& p) {
  CellRecords out;
  out.per_cell.resize(p.cells.size());
  if (path.size() < 2) return out;

  // cell lookup by integer index
  std::map<std::pair<long, long>, std::size_t> index;
  for (std::size_t i = 0; i < p.cells.size(); ++i)
    index[{p.cells[i].ix, p.cells[i].iy}] = i;

  const CellIndexer ci{p.offset.real(), p.offset.imag(), p.mesh()};

  // sweep: maintain the open record of the current cell
  bool open = false;
  std::pair<long, long> cur_cell{0, 0};
  ExcursionRecord rec;

  std::size_t next_hit = 0;
  auto hit_between = [&](double t0, double t1) {
    while (next_hit < path.target_hits.size() &&
           path.times[path.target_hits[next_hit]] < t0)
      ++next_hit;
    return next_hit < path.target_hits.size() &&
           path.times[path.target_hits[next_hit]] <= t1;
  };

  auto open_at = [&](std::pair<long, long> cell, Point pt, double t,
                     std::size_t i, EndpointClass cls) {
    open = true;
    cur_cell = cell;
    rec = ExcursionRecord{};
    rec.e_g = pt;
    rec.start_class = cls;
    rec.t_begin = t;
    rec.i_begin = i;
  };
  auto close_at = [&](Point pt, double t, std::size_t i, EndpointClass cls) {
    rec.e_d = pt;
    rec.end_class = cls;
    rec.t_end = t;
    rec.i_end = i;
    rec.hits_x = hit_between(rec.t_begin, t);
    const auto it = index.find(cur_cell);
    if (it != index.end()) {
      rec.order = static_cast<int>(out.per_cell[it->second].size());
      out.per_cell[it->second].push_back(rec);
    }
    open = false;
  };

  open_at(ci.of(path.pos.front()), path.pos.front(), path.times.front(), 0,
          EndpointClass::PathEndpoint);

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path.pos[i], b = path.pos[i + 1];
    const double ta = path.times[i], tb = path.times[i + 1];
    const auto ca = ci.of(a), cb = ci.of(b);
    if (ca == cb) continue;
    // collect lattice-line crossings of the segment
    const Point d = b - a;
    std::vector<double> ts;
    auto push_lines = [&](double a0, double d0, double o0, long klo, long khi) {
      if (d0 == 0) return;
      for (long k = std::min(klo, khi) + 1; k <= std::max(klo, khi); ++k) {
        const double t = (o0 + k * ci.mesh - a0) / d0;
        if (t > 0 && t < 1) ts.push_back(t);
      }
    };
    push_lines(a.real(), d.real(), ci.ox, ca.first, cb.first);
    push_lines(a.imag(), d.imag(), ci.oy, ca.second, cb.second);
    std::sort(ts.begin(), ts.end());
    double prev_t = 0.0;
    auto cell_prev = ca;
    for (const double t : ts) {
      const Point pt = a + t * d;
      const double tt = ta + t * (tb - ta);
      // the cell after this crossing: probe just beyond
      const auto cell_next = ci.of(a + std::min(1.0, t + 1e-12) * d);
      if (cell_next == cell_prev) continue;
      if (open) close_at(pt, tt, i + 1, EndpointClass::BoundaryOfD1);
      open_at(cell_next, pt, tt, i, EndpointClass::BoundaryOfD1);
      cell_prev = cell_next;
      prev_t = t;
    }
    (void)prev_t;
  }
  if (open)
    close_at(path.pos.back(), path.times.back(), path.size() - 1,
             EndpointClass::PathEndpoint);
  return out;
}

namespace {

// xi values at the quadrature nodes for one cell, nodes-major layout
struct CellXi {
  std::vector<Point> nodes;        // 16 quadrature points
  std::vector<double> node_w;      // quadrature weights (area-scaled)
  std::vector<double> xi;          // records x nodes
  std::vector<double> cap;         // capacity at nodes
  std::size_t n_records = 0;
};

CellXi cell_xi_values(const Cell& c, const std::vector<ExcursionRecord>& recs) {
  CellXi cx;
  const NiceDomain cell = NiceDomain::rect(c.x0, c.y0, c.x1, c.y1);
  const double hx = 0.5 * (c.x1 - c.x0), hy = 0.5 * (c.y1 - c.y0);
  const double mx = 0.5 * (c.x1 + c.x0), my = 0.5 * (c.y1 + c.y0);
  for (int qi = 0; qi < 4; ++qi)
    for (int qj = 0; qj < 4; ++qj) {
      cx.nodes.emplace_back(mx + hx * kGlX[qi], my + hy * kGlX[qj]);
      cx.node_w.push_back(hx * hy * kGlW[qi] * kGlW[qj]);
    }
  cx.cap.reserve(cx.nodes.size());
  for (const auto& nd : cx.nodes) cx.cap.push_back(capacity(cell, nd));

  cx.n_records = 0;
  for (const auto& r : recs) {
    if (std::abs(r.e_g - r.e_d) < 1e-12) continue;  // grazing, xi -> 0
    const double h_gd = kernel_H(cell, r.e_g, r.e_d);
    for (const auto& nd : cx.nodes)
      cx.xi.push_back(kTwoPi * kernel_H(cell, nd, r.e_g) *
                      kernel_H(cell, nd, r.e_d) / h_gd);
    ++cx.n_records;
  }
  return cx;
}

}  // namespace

std::vector<MeasureField> build_fields(const PathSample& path,
                                       const GridPartition& p,
                                       const std::vector<double>& alphas) {
  const double mesh = p.mesh();
  if (path.step > mesh * mesh / 100.0)
    throw ConfigError("build_field: path step too coarse for this level");

  const auto records = collect_cell_records(path, p);
  std::vector<MeasureField> fields(alphas.size());
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    fields[ai].partition = p;
    fields[ai].alpha = alphas[ai];
    fields[ai].masses.assign(p.cells.size(), 0.0);
    fields[ai].clipped.assign(p.cells.size(), 0);
  }
  std::vector<double> xs;
  for (std::size_t c = 0; c < p.cells.size(); ++c) {
    const bool clip = !p.cells[c].square;
    for (auto& f : fields) f.clipped[c] = clip;
    if (clip) continue;
    if (records.per_cell[c].empty()) continue;
    const CellXi cx = cell_xi_values(p.cells[c], records.per_cell[c]);
    for (std::size_t q = 0; q < cx.nodes.size(); ++q) {
      xs.clear();
      for (std::size_t r = 0; r < cx.n_records; ++r)
        xs.push_back(cx.xi[r * cx.nodes.size() + q]);
      for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        const double m = martingale_weight({xs, alphas[ai], cx.cap[q]});
        fields[ai].masses[c] += cx.node_w[q] * m;
      }
    }
  }
  return fields;
}

MeasureField build_field(const PathSample& path, const GridPartition& p,
                         double alpha) {
  return build_fields(path, p, {alpha})[0];
}

std::vector<double> refine_sequence(const PathSample& path,
                                    const NiceDomain& domain, Point offset,
                                    int n_lo, int n_hi, double alpha,
                                    double ax0, double ay0, double ax1,
                                    double ay1) {
  std::vector<double> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    const auto p = grid_partition(domain, n, offset);
    const auto f = build_field(path, p, alpha);
    out.push_back(f.mass_in_rect(ax0, ay0, ax1, ay1));
  }
  return out;
}

MeasureField product_field(const std::vector<const PathSample*>& paths,
                           const GridPartition& p, double alpha) {
  if (paths.empty()) throw std::invalid_argument("product_field: no paths");
  const double mesh = p.mesh();
  for (const auto* path : paths)
    if (path->step > mesh * mesh / 100.0)
      throw ConfigError("product_field: path step too coarse");

  MeasureField f;
  f.partition = p;
  f.alpha = alpha;
  f.masses.assign(p.cells.size(), 0.0);
  f.clipped.assign(p.cells.size(), 0);

  std::vector<CellRecords> records;
  records.reserve(paths.size());
  for (const auto* path : paths)
    records.push_back(collect_cell_records(*path, p));

  std::vector<double> xs;
  for (std::size_t c = 0; c < p.cells.size(); ++c) {
    f.clipped[c] = !p.cells[c].square;
    if (f.clipped[c]) continue;
    bool all_visited = true;
    for (const auto& r : records)
      if (r.per_cell[c].empty()) all_visited = false;
    if (!all_visited) continue;  // any empty factor kills the product
    std::vector<CellXi> cxs;
    for (const auto& r : records)
      cxs.push_back(cell_xi_values(p.cells[c], r.per_cell[c]));
    const auto& nodes = cxs.front().nodes;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      double prod = cxs.front().node_w[q];
      for (const auto& cx : cxs) {
        xs.clear();
        for (std::size_t r = 0; r < cx.n_records; ++r)
          xs.push_back(cx.xi[r * nodes.size() + q]);
        prod *= martingale_weight({xs, alpha, cx.cap[q]});
      }
      f.masses[c] += prod;
    }
  }
  return f;
}

std::vector<double> occupation_by_cell(const PathSample& path,
                                       const GridPartition& p) {
  std::vector<double> occ(p.cells.size(), 0.0);
  const auto records = collect_cell_records(path, p);
  for (std::size_t c = 0; c < p.cells.size(); ++c)
    for (const auto& r : records.per_cell[c]) occ[c] += r.t_end - r.t_begin;
  return occ;
}

std::string field_to_csv(const MeasureField& f) {
  std::string s = "level,cell_i,cell_j,mass\n";
  char buf[128];
  for (std::size_t i = 0; i < f.masses.size(); ++i) {
    const auto& c = f.partition.cells[i];
    std::snprintf(buf, sizeof(buf), "%d,%ld,%ld,%.17g\n", c.level, c.ix, c.iy,
                  f.masses[i]);
    s += buf;
  }
  return s;
}

std::string field_to_json(const MeasureField& f) {
  nlohmann::json j;
  j["level"] = f.partition.level;
  j["alpha"] = f.alpha;
  j["domain"] = nlohmann::json::parse(f.partition.domain.to_json());
  auto cells = nlohmann::json::array();
  for (std::size_t i = 0; i < f.masses.size(); ++i) {
    const auto& c = f.partition.cells[i];
    cells.push_back({{"i", c.ix},
                     {"j", c.iy},
                     {"mass", f.masses[i]},
                     {"clipped", static_cast<bool>(f.clipped[i])}});
  }
  j["cells"] = cells;
  return j.dump();
}

}  // namespace thickpoints
