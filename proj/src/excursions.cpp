#include "thickpoints/excursions.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace thickpoints {

namespace {

bool at_point(Point p, Point x) { return p == x; }

EndpointClass classify_endpoint(Point p, const NiceDomain& D1, Point x,
                                bool is_path_end) {
  if (at_point(p, x)) return EndpointClass::PointX;
  if (is_path_end) return EndpointClass::PathEndpoint;
  return EndpointClass::BoundaryOfD1;
}

}  // namespace

std::vector<ExcursionRecord> excursions_inside(const PathSample& path,
                                               const NiceDomain& D1, Point x) {
  std::vector<ExcursionRecord> out;
  if (path.size() < 2) return out;
  if (path.step > 0) {
    // resolution guard: the mesh must resolve the subdomain
    const double scale = D1.diameter();
    if (std::sqrt(path.step) > 0.5 * scale)
      throw ConfigError("excursions_inside: path step too coarse for D1");
  }

  // x-visit marks per index
  std::vector<std::size_t> xhits;
  for (const auto idx : path.target_hits)
    if (at_point(path.pos[idx], x)) xhits.push_back(idx);

  bool inside = D1.contains(path.pos.front());
  ExcursionRecord cur;
  int order = 0;
  std::size_t next_hit = 0;
  auto hits_in = [&](std::size_t lo, std::size_t hi) {
    while (next_hit < xhits.size() && xhits[next_hit] < lo) ++next_hit;
    return next_hit < xhits.size() && xhits[next_hit] <= hi;
  };

  if (inside) {
    cur.e_g = path.pos.front();
    cur.start_class = classify_endpoint(cur.e_g, D1, x, true);
    cur.i_begin = 0;
    cur.t_begin = path.times.front();
  }

  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path.pos[i], b = path.pos[i + 1];
    const auto crossings = D1.boundary_crossings(a, b);
    for (const auto& cr : crossings) {
      if (inside) {
        // closing an excursion at the boundary
        cur.e_d = cr.second;
        cur.end_class = EndpointClass::BoundaryOfD1;
        cur.i_end = i + 1;
        cur.t_end = path.times[i] +
                    cr.first * (path.times[i + 1] - path.times[i]);
        cur.order = order++;
        cur.hits_x = hits_in(cur.i_begin, i);
        out.push_back(cur);
        inside = false;
      } else {
        inside = true;
        cur = ExcursionRecord{};
        cur.e_g = cr.second;
        cur.start_class = EndpointClass::BoundaryOfD1;
        cur.i_begin = i;  // geometry begins inside this segment
        cur.t_begin = path.times[i] +
                      cr.first * (path.times[i + 1] - path.times[i]);
      }
    }
    // tolerance resync: crossing roots and the containment test can disagree
    // by an ulp when a point sits on the boundary
    const bool b_inside = D1.contains(b);
    if (crossings.empty() && inside != b_inside) {
      if (inside) {
        cur.e_d = D1.project_to_boundary(b);
        cur.end_class = EndpointClass::BoundaryOfD1;
        cur.i_end = i + 1;
        cur.t_end = path.times[i + 1];
        cur.order = order++;
        cur.hits_x = hits_in(cur.i_begin, i + 1);
        out.push_back(cur);
      } else {
        cur = ExcursionRecord{};
        cur.e_g = D1.project_to_boundary(b);
        cur.start_class = EndpointClass::BoundaryOfD1;
        cur.i_begin = i;
        cur.t_begin = path.times[i + 1];
      }
      inside = b_inside;
    }
  }

  if (inside) {
    cur.e_d = path.pos.back();
    cur.end_class = classify_endpoint(cur.e_d, D1, x, true);
    cur.i_end = path.size() - 1;
    cur.t_end = path.times.back();
    cur.order = order++;
    cur.hits_x = hits_in(cur.i_begin, path.size() - 1);
    out.push_back(cur);
  }
  return out;
}

CrossingTimes crossing_times(const PathSample& path, const NiceDomain& D2,
                             const NiceDomain& D1, Point x) {
  // nesting precondition: D2 inside D1 at positive distance, checked on a
  // sample of boundary points of D2
  {
    const auto q = D2.boundary_quadrature(16);
    for (const auto& p : q.points)
      if (D1.boundary_distance(p) <= 0)
        throw std::invalid_argument("crossing_times: D2 not nested in D1");
  }

  CrossingTimes ct;
  std::vector<std::size_t> xhits;
  for (const auto idx : path.target_hits)
    if (path.pos[idx] == x) xhits.push_back(idx);

  bool seeking_t = true;  // alternate: boundary of D2, then boundary of D1
  double pending_t = 0.0;
  std::size_t pending_begin = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point a = path.pos[i], b = path.pos[i + 1];
    for (;;) {
      if (seeking_t) {
        // next hit of the boundary of D2 within this segment
        const auto cr = D2.boundary_crossings(a, b);
        bool found = false;
        for (const auto& c : cr) {
          const double t =
              path.times[i] + c.first * (path.times[i + 1] - path.times[i]);
          if (!ct.s_list.empty() && t <= ct.s_list.back()) continue;
          if (ct.s_list.empty() && ct.t_list.empty() && t <= path.times.front())
            continue;
          pending_t = t;
          pending_begin = i;
          ct.t_list.push_back(t);
          seeking_t = false;
          found = true;
          break;
        }
        if (!found) break;
      } else {
        const auto cr = D1.boundary_crossings(a, b);
        bool found = false;
        for (const auto& c : cr) {
          const double t =
              path.times[i] + c.first * (path.times[i + 1] - path.times[i]);
          if (t <= pending_t) continue;
          ct.s_list.push_back(t);
          // x-visit within [t_i, s_i]?
          for (const auto idx : xhits) {
            if (path.times[idx] >= pending_t && path.times[idx] <= t) {
              ct.hit_indices.push_back(static_cast<int>(ct.t_list.size()));
              break;
            }
          }
          seeking_t = true;
          found = true;
          break;
        }
        if (!found) break;
      }
    }
    (void)pending_begin;
  }
  if (!seeking_t) {
    // the path ends before returning to the boundary of D1: the path end
    // closes the interval
    ct.s_list.push_back(path.times.back());
    for (const auto idx : xhits) {
      if (path.times[idx] >= pending_t) {
        ct.hit_indices.push_back(static_cast<int>(ct.t_list.size()));
        break;
      }
    }
  }
  return ct;
}

std::vector<long> count_crossings(const PathSample& path, Point x,
                                  const std::vector<double>& radii) {
  std::vector<long> counts(radii.size(), 0);
  std::vector<std::size_t> xhits;
  for (const auto idx : path.target_hits)
    if (path.pos[idx] == x) xhits.push_back(idx);
  if (xhits.empty()) return counts;

  for (std::size_t r_i = 0; r_i < radii.size(); ++r_i) {
    const double r = radii[r_i];
    // state machine: from an x-visit, seek the circle; from the circle, seek
    // the next x-visit
    bool at_x = false;
    std::size_t next_hit = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (next_hit < xhits.size() && xhits[next_hit] == i) {
        at_x = true;
        ++next_hit;
        continue;
      }
      if (at_x && i > 0) {
        // crossed the circle within segment (i-1, i)?
        const double ra = std::abs(path.pos[i - 1] - x);
        const double rb = std::abs(path.pos[i] - x);
        if (std::max(ra, rb) >= r) {
          ++counts[r_i];
          at_x = false;
        }
      }
    }
  }
  return counts;
}

std::string excursions_to_json(const std::vector<ExcursionRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j;
    j["g"] = {r.e_g.real(), r.e_g.imag()};
    j["d"] = {r.e_d.real(), r.e_d.imag()};
    j["order"] = r.order;
    j["hits_x"] = r.hits_x;
    arr.push_back(j);
  }
  return arr.dump();
}

std::vector<double> xi_values_for(const NiceDomain& D1, Point x,
                                  const std::vector<ExcursionRecord>& records) {
  std::vector<double> xs;
  xs.reserve(records.size());
  for (const auto& r : records) xs.push_back(xi(D1, x, r.e_g, r.e_d));
  return xs;
}

}  // namespace thickpoints
