#include "thickpoints/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace thickpoints {

namespace {

struct Ladder {
  const CircleLadder* def = nullptr;
  std::vector<char>* hits = nullptr;

  void mark(int i) {
    if (hits && i >= 0 && i < static_cast<int>(hits->size())) (*hits)[i] = 1;
  }
  // mark every radius in [lo, hi]
  void mark_range(double lo, double hi) {
    if (!def || !hits) return;
    for (std::size_t i = 0; i < def->radii.size(); ++i)
      if (def->radii[i] >= lo && def->radii[i] <= hi) (*hits)[i] = 1;
  }
  // process one step w -> wp over time dt: geometric reach plus bridge grazes
  void step(Point w, Point wp, double dt, Rng& rng) {
    if (!def || !hits) return;
    const double r1 = std::abs(w - def->center);
    const double r2 = std::abs(wp - def->center);
    // the segment's radial reach: radii between min and max are crossed;
    // the mid-segment can reach slightly beyond either endpoint radius
    const Point d = wp - w;
    const double len2 = std::norm(d);
    double rmax = std::max(r1, r2), rmin = std::min(r1, r2);
    if (len2 > 0) {
      const double t =
          -((w - def->center).real() * d.real() + (w - def->center).imag() * d.imag()) /
          len2;
      if (t > 0 && t < 1) rmin = std::min(rmin, std::abs(w + t * d - def->center));
    }
    mark_range(rmin, rmax);
    // bridge graze beyond rmax (locally flat circle approximation)
    for (std::size_t i = 0; i < def->radii.size(); ++i) {
      const double r = def->radii[i];
      if (r <= rmax) continue;
      if ((*hits)[i]) continue;
      const double d1 = r - r1, d2 = r - r2;
      if (d1 <= 0 || d2 <= 0) continue;
      const double p = std::exp(-2.0 * d1 * d2 / dt);
      if (p < 1e-12) break;  // radii ascend, probabilities only shrink
      if (rng.uniform() < p) (*hits)[i] = 1;
    }
    // inward grazes do not create hits (hits record outward reach)
  }
};

struct Walk {
  PathSample path;
  double t = 0.0;

  void start(Point p, double h) {
    path.step = h;
    path.times.push_back(0.0);
    path.pos.push_back(p);
  }
  void append(Point p, double dt) {
    t += std::max(dt, 1e-15 * (1.0 + t));
    path.times.push_back(t);
    path.pos.push_back(p);
  }
  Point cur() const { return path.pos.back(); }
};

double auto_or(double v, double fallback) { return v > 0.0 ? v : fallback; }

// exact exit of one Euler segment from the domain: bridge fires count too
struct ExitCheck {
  bool exited = false;
  Point at{0, 0};
  double frac = 1.0;  // fraction of dt consumed
};

ExitCheck check_exit(const NiceDomain& D, Point w, Point wp, double dt,
                     Rng& rng) {
  ExitCheck ec;
  if (!D.contains(wp)) {
    const auto hit = D.segment_boundary_hit(w, wp);
    if (hit) {
      ec.exited = true;
      ec.at = hit->second;
      ec.frac = hit->first;
      return ec;
    }
    // numerical corner case: project the endpoint
    ec.exited = true;
    ec.at = D.project_to_boundary(wp);
    ec.frac = 1.0;
    return ec;
  }
  const double d1 = D.boundary_distance(w);
  const double d2 = D.boundary_distance(wp);
  if (d1 > 0 && d2 > 0) {
    const double p = std::exp(-2.0 * d1 * d2 / dt);
    if (p > 1e-12 && rng.uniform() < p) {
      ec.exited = true;
      // exit near the segment point closest to the boundary
      const Point mid = (d1 < d2) ? w : wp;
      ec.at = D.project_to_boundary(mid);
      ec.frac = 0.5;
      return ec;
    }
  }
  return ec;
}

Point gaussian_step(Rng& rng, double dt) {
  const double s = std::sqrt(dt);
  return Point(s * rng.normal(), s * rng.normal());
}

}  // namespace

PathSample sample_killed_bm(const NiceDomain& D, Point start, double h,
                            Rng& rng, const SamplerOptions& opt) {
  if (!(h > 0)) throw std::invalid_argument("sample_killed_bm: h <= 0");
  if (!D.contains(start))
    throw std::invalid_argument("sample_killed_bm: start not interior");
  Ladder ladder{opt.ladder, opt.ladder_hits};
  if (opt.ladder && opt.ladder_hits)
    opt.ladder_hits->assign(opt.ladder->radii.size(), 0);
  Walk walk;
  walk.start(start, h);
  for (long step = 0; step < opt.max_steps; ++step) {
    const Point w = walk.cur();
    const Point wp = w + gaussian_step(rng, h);
    const auto ec = check_exit(D, w, wp, h, rng);
    if (ec.exited) {
      ladder.step(w, ec.at, h * ec.frac, rng);
      walk.append(ec.at, h * ec.frac);
      walk.path.terminal = TerminalEvent::ExitedDomain;
      return walk.path;
    }
    ladder.step(w, wp, h, rng);
    walk.append(wp, h);
  }
  throw std::runtime_error("sample_killed_bm: step guard exceeded");
}

namespace {

// shared h-transform stepping core
PathSample run_conditioned(const NiceDomain& D, Point z,
                           const ConditioningSpec& spec, double h, Rng& rng,
                           const SamplerOptions& opt) {
  const double diam = D.diameter();
  const Point target = spec.target;
  const bool hit_mode = spec.mode == ConditioningSpec::Mode::HitPoint;
  double gate = auto_or(spec.gate_radius, 1e-3 * diam);
  if (hit_mode)  // the gate ball must sit inside the domain
    gate = std::min(gate, 0.45 * D.boundary_distance(target));
  const double snap = auto_or(spec.snap_radius, 1e-6 * diam);
  const double c = opt.adapt;

  Ladder ladder{opt.ladder, opt.ladder_hits};
  if (opt.ladder && opt.ladder_hits &&
      opt.ladder_hits->size() != opt.ladder->radii.size())
    opt.ladder_hits->assign(opt.ladder->radii.size(), 0);

  Point w = z;
  if (D.is_boundary(z)) {
    const double eps = auto_or(spec.boundary_offset, 1e-4 * diam);
    w = z + eps * D.inward_normal(z);
  } else if (!D.contains(w)) {
    throw std::invalid_argument("sample_conditioned: start outside the domain");
  }

  Walk walk;
  walk.start(w, h);

  long dips = 0;
  for (long step = 0; step < opt.max_steps; ++step) {
    w = walk.cur();
    const double dist_t = std::abs(w - target);

    if (hit_mode && dist_t < gate) {
      // gate decision: the path from w hits the target before leaving the
      // gate ball with exactly G_{B(target,gate)}(w,x) / G_D(w,x)
      const double p_final =
          std::log(gate / dist_t) / green(D, target, w);
      if (rng.uniform() < std::min(1.0, std::max(0.0, p_final))) {
        walk.append(target, dist_t * dist_t);
        walk.path.target_hits.push_back(walk.path.pos.size() - 1);
        walk.path.terminal = TerminalEvent::HitTarget;
        return walk.path;
      }
      // non-final dip: a plain Brownian arc back to the gate circle (the
      // conditioned exit reweighting by G_D(target,.) varies by O(gate)
      // over the circle and is neglected)
      ++dips;
      for (long ds = 0; ds < opt.max_steps; ++ds) {
        const Point wc = walk.cur();
        const double dg = gate - std::abs(wc - target);
        const double dt = std::max(sq(c * std::max(dg, gate / 8.0)), 1e-30);
        const Point wp = wc + gaussian_step(rng, dt);
        if (std::abs(wp - target) >= gate) {
          // land exactly on the gate circle
          const auto hit = NiceDomain::disk(target, gate)
                               .segment_boundary_hit(wc, wp);
          const Point out = hit ? hit->second
                                : target + gate * (wp - target) /
                                               std::abs(wp - target);
          walk.append(out, dt * (hit ? hit->first : 1.0));
          break;
        }
        walk.append(wp, dt);
      }
      continue;
    }

    if (!hit_mode && dist_t < snap) {
      walk.append(target, dist_t * dist_t);
      walk.path.target_hits.push_back(walk.path.pos.size() - 1);
      walk.path.terminal = TerminalEvent::HitTarget;
      return walk.path;
    }

    const double d_b = D.boundary_distance(w);
    double dt = std::min(h, sq(c * dist_t));
    if (hit_mode) dt = std::min(dt, sq(3.0 * c * d_b));
    dt = std::max(dt, 1e-30);

    const Point drift = hit_mode ? grad_log_green_target(D, target, w)
                                 : grad_log_H_to_boundary(D, w, target);
    Point wp;
    bool ok = false;
    bool arrived = false;
    for (int attempt = 0; attempt < 200; ++attempt) {
      wp = w + drift * dt + gaussian_step(rng, dt);
      if (!hit_mode && std::abs(wp - target) < snap) {
        ok = true;
        arrived = true;
        break;
      }
      auto ec = check_exit(D, w, wp, dt, rng);
      if (!ec.exited) {
        ok = true;
        break;
      }
      if (!hit_mode && std::abs(ec.at - target) < 16.0 * snap) {
        // discrete exit adjacent to the conditioning point: accept as arrival
        wp = ec.at;
        ok = true;
        arrived = true;
        break;
      }
      // conditioned paths do not touch the boundary: redraw the increment
    }
    if (!ok) {
      walk.path.terminal = TerminalEvent::ExitedDomain;
      return walk.path;  // pathological; caller treats as violation
    }
    ladder.step(w, wp, dt, rng);
    walk.append(wp, dt);
    if (arrived) {
      walk.append(target, std::norm(wp - target));
      walk.path.target_hits.push_back(walk.path.pos.size() - 1);
      walk.path.terminal = TerminalEvent::HitTarget;
      return walk.path;
    }
  }
  throw std::runtime_error("sample_conditioned: step guard exceeded");
}

}  // namespace

PathSample sample_conditioned(const NiceDomain& D, Point z,
                              const ConditioningSpec& spec, double h, Rng& rng,
                              const SamplerOptions& opt) {
  if (!(h > 0)) throw std::invalid_argument("sample_conditioned: h <= 0");
  if (spec.mode == ConditioningSpec::Mode::KillAtBoundary)
    return sample_killed_bm(D, z, h, rng, opt);
  if (spec.mode == ConditioningSpec::Mode::HitPoint) {
    if (D.classify(spec.target) != PointClass::Interior)
      throw std::invalid_argument("sample_conditioned: hit target not interior");
  } else {
    if (D.classify(spec.target) != PointClass::Boundary)
      throw std::invalid_argument("sample_conditioned: exit target not on boundary");
  }
  if (spec.target == z)
    throw std::invalid_argument("sample_conditioned: target equals start");
  return run_conditioned(D, z, spec, h, rng, opt);
}

PathSample sample_loop_escaping(const NiceDomain& D, Point x,
                                const NiceDomain& D1, double h, Rng& rng,
                                const SamplerOptions& opt) {
  if (D1.classify(x) != PointClass::Interior)
    throw std::invalid_argument("sample_loop_escaping: x must lie in D1");
  // exit point density on the boundary of D1: G_D(x,y) H_{D1}(x,y) dy,
  // inverse-CDF sampled on a quadrature grid
  const int n = 1024;
  const auto q = D1.boundary_quadrature(n);
  std::vector<double> cdf(q.points.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    total += q.weights[i] * green(D, x, q.points[i]) *
             poisson_kernel(D1, x, q.points[i]);
    cdf[i] = total;
  }
  const double u = rng.uniform() * total;
  const std::size_t idx =
      std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
  const Point y = q.points[std::min(idx, q.points.size() - 1)];

  const double gate =
      auto_or(opt.ladder && !opt.ladder->radii.empty()
                  ? 0.45 * opt.ladder->radii.front()
                  : 0.0,
              0.2 * D1.boundary_distance(x));

  // out-segment: reversal of a conditioned path y -> x inside D1
  ConditioningSpec in_spec;
  in_spec.mode = ConditioningSpec::Mode::HitPoint;
  in_spec.target = x;
  in_spec.gate_radius = std::min(gate, 0.2 * D1.boundary_distance(x));
  SamplerOptions inner = opt;
  inner.ladder = nullptr;  // the out-segment stays inside D1
  inner.ladder_hits = nullptr;
  PathSample out_leg = sample_conditioned(D1, y, in_spec, h, rng, inner);
  PathSample out = reverse_path(out_leg);

  // return segment: conditioned path y -> x in D
  ConditioningSpec back_spec = in_spec;
  back_spec.gate_radius = gate;
  PathSample back = sample_conditioned(D, y, back_spec, h, rng, opt);

  PathSample loop = concatenate_paths({&out, &back});
  loop.terminal = TerminalEvent::HitTarget;
  return loop;
}

BesqSample sample_besq(int dimension, double start,
                       const std::vector<double>& times, Rng& rng) {
  if (dimension != 2 && dimension != 4)
    throw std::invalid_argument("sample_besq: dimension must be 2 or 4");
  if (start < 0) throw std::invalid_argument("sample_besq: negative start");
  BesqSample s;
  s.dimension = dimension;
  s.times = times;
  s.values.reserve(times.size());
  double prev_t = 0.0, prev_v = start;
  for (const double t : times) {
    if (t < prev_t) throw std::invalid_argument("sample_besq: times not sorted");
    const double dt = t - prev_t;
    double v = prev_v;
    if (dt > 0) {
      // X_t | X_0 = v0 is dt times a noncentral chi-square with `dimension`
      // degrees of freedom and noncentrality v0/dt
      const int extra = prev_v > 0 ? rng.poisson(prev_v / (2.0 * dt)) : 0;
      v = dt * rng.chi_square(static_cast<double>(dimension + 2 * extra));
    }
    s.values.push_back(v);
    prev_t = t;
    prev_v = v;
  }
  return s;
}

PathSample reverse_path(const PathSample& p) {
  PathSample r;
  r.step = p.step;
  r.terminal = p.terminal;
  const double total = p.times.back();
  r.times.reserve(p.size());
  r.pos.reserve(p.size());
  for (std::size_t i = p.size(); i-- > 0;) {
    r.times.push_back(total - p.times[i]);
    r.pos.push_back(p.pos[i]);
  }
  for (const auto idx : p.target_hits)
    r.target_hits.push_back(p.size() - 1 - idx);
  std::sort(r.target_hits.begin(), r.target_hits.end());
  return r;
}

PathSample concatenate_paths(const std::vector<const PathSample*>& parts) {
  PathSample out;
  if (parts.empty()) return out;
  out.step = parts.front()->step;
  double t0 = 0.0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const PathSample& p = *parts[pi];
    const std::size_t skip = (pi == 0) ? 0 : 1;  // joint point shared
    const std::size_t base = out.pos.size() - skip;
    for (std::size_t i = skip; i < p.size(); ++i) {
      out.times.push_back(t0 + p.times[i] - p.times.front());
      out.pos.push_back(p.pos[i]);
    }
    for (const auto idx : p.target_hits) {
      const std::size_t j = base + idx;
      if (out.target_hits.empty() || out.target_hits.back() != j)
        out.target_hits.push_back(j);
    }
    t0 = out.times.back();
    out.terminal = p.terminal;
  }
  return out;
}

}  // namespace thickpoints
