#include "thickpoints/qlaw.hpp"

#include <algorithm>
#include <cmath>

#include "thickpoints/stats.hpp"
#include "thickpoints/weights.hpp"

namespace thickpoints {

PathSample QPathBundle::concatenated() const {
  std::vector<const PathSample*> parts;
  parts.push_back(&approach);
  for (const auto& l : loops) parts.push_back(&l);
  parts.push_back(&exit_leg);
  return concatenate_paths(parts);
}

std::vector<long> QPathBundle::loop_crossing_counts() const {
  std::vector<long> counts(ladder.radii.size(), 0);
  for (const auto& hits : loop_hits)
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (hits[i]) ++counts[i];
  return counts;
}

QPathBundle sample_q(const NiceDomain& D, Point z, Point zp, Point x,
                     double alpha, double r_min, double h, Rng& rng,
                     const std::vector<double>& ladder_radii) {
  if (D.classify(x) != PointClass::Interior)
    throw std::invalid_argument("sample_q: x must be interior");
  if (x == z || x == zp || z == zp)
    throw std::invalid_argument("sample_q: z, z', x must be distinct");
  if (!(r_min > 0) || D.boundary_distance(x) <= 2.0 * r_min)
    throw std::invalid_argument("sample_q: r_min unusable at this x");
  for (const double r : ladder_radii)
    if (r < r_min)
      throw std::invalid_argument("sample_q: ladder radius below r_min");

  QPathBundle b;
  b.x = x;
  b.alpha = alpha;
  b.ladder.center = x;
  b.ladder.radii = ladder_radii;
  std::sort(b.ladder.radii.begin(), b.ladder.radii.end());

  const NiceDomain S = NiceDomain::disk(x, r_min);
  const double gate = 0.45 * r_min;

  SamplerOptions opt;
  opt.ladder = b.ladder.radii.empty() ? nullptr : &b.ladder;

  // approach z -> x
  ConditioningSpec approach_spec;
  approach_spec.mode = ConditioningSpec::Mode::HitPoint;
  approach_spec.target = x;
  approach_spec.gate_radius = gate;
  opt.ladder_hits = &b.approach_ladder_hits;
  b.approach = sample_conditioned(D, z, approach_spec, h, rng, opt);

  // loop soup: count is Poisson with mean alpha * C_{D,S}(x)
  const double mean_loops = alpha * capacity_gap(D, S, x);
  const int K = alpha > 0 ? rng.poisson(mean_loops) : 0;
  b.tags.resize(K);
  for (auto& t : b.tags) t = rng.uniform_in(0.0, alpha);
  std::sort(b.tags.begin(), b.tags.end());
  b.loops.reserve(K);
  b.loop_hits.resize(K);
  for (int k = 0; k < K; ++k) {
    opt.ladder_hits = &b.loop_hits[k];
    b.loops.push_back(sample_loop_escaping(D, x, S, h, rng, opt));
  }
  double cum = 0.0;
  b.cum_lifetimes.reserve(K);
  for (const auto& l : b.loops) {
    cum += l.duration();
    b.cum_lifetimes.push_back(cum);
  }

  // exit x -> z'
  ConditioningSpec exit_spec;
  exit_spec.target = zp;
  if (D.classify(zp) == PointClass::Boundary) {
    exit_spec.mode = ConditioningSpec::Mode::ExitAtBoundaryPoint;
  } else {
    exit_spec.mode = ConditioningSpec::Mode::HitPoint;
    exit_spec.gate_radius = 0.25 * std::min(std::abs(zp - x),
                                            D.boundary_distance(zp));
  }
  opt.ladder_hits = &b.exit_ladder_hits;
  b.exit_leg = sample_conditioned(D, x, exit_spec, h, rng, opt);
  return b;
}

double LocalTimeCurve::value(double t) const {
  if (t <= t_x) return 0.0;
  const double u = t - t_x;
  if (cum.empty() || u >= cum.back()) return alpha;
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return tags[static_cast<std::size_t>(it - cum.begin())];
}

LocalTimeCurve local_time_curve(const QPathBundle& b) {
  LocalTimeCurve c;
  c.t_x = b.t_x();
  c.alpha = b.alpha;
  c.cum = b.cum_lifetimes;
  c.tags = b.tags;
  return c;
}

std::vector<double> bundle_upsilon(const QPathBundle& b) {
  // single sweep over the concatenated polyline maintaining, per ladder
  // radius, the open-excursion state; crossing points from exact quadratic
  // roots. A record that covers a concatenation joint sits at x and is
  // excluded (the 1{x not in e} indicator).
  const auto& radii = b.ladder.radii;
  std::vector<double> out(radii.size(), 0.0);
  if (radii.empty()) return out;
  const PathSample whole = b.concatenated();
  const Point x = b.x;

  struct State {
    bool inside = false;
    bool seen_x = false;
    Point e_g{0, 0};
  };
  std::vector<State> st(radii.size());
  {
    const double r0 = std::abs(whole.pos.front() - x);
    for (std::size_t i = 0; i < radii.size(); ++i)
      st[i].inside = r0 < radii[i];
  }
  std::size_t next_hit = 0;

  for (std::size_t i = 0; i + 1 < whole.size(); ++i) {
    // joint at index i: every open record contains x
    while (next_hit < whole.target_hits.size() &&
           whole.target_hits[next_hit] < i)
      ++next_hit;
    if (next_hit < whole.target_hits.size() &&
        whole.target_hits[next_hit] == i && whole.pos[i] == x) {
      for (auto& s : st)
        if (s.inside) s.seen_x = true;
    }

    const Point a = whole.pos[i], bp = whole.pos[i + 1];
    const double ra = std::abs(a - x), rb = std::abs(bp - x);
    const double lo = std::min(ra, rb), hi = std::max(ra, rb);
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const double r = radii[ri];
      if (r <= lo || r > hi) continue;  // no crossing at this radius
      // exact crossing parameters with the circle |p - x| = r
      const Point d = bp - a, f = a - x;
      const double A = std::norm(d);
      if (A == 0) continue;
      const double B = 2.0 * (f.real() * d.real() + f.imag() * d.imag());
      const double C = std::norm(f) - r * r;
      const double disc = B * B - 4 * A * C;
      if (disc < 0) continue;
      const double sd = std::sqrt(disc);
      for (const double tc : {(-B - sd) / (2 * A), (-B + sd) / (2 * A)}) {
        if (tc <= 0 || tc > 1) continue;
        const Point p = a + tc * d;
        auto& s = st[ri];
        if (s.inside) {
          if (!s.seen_x) out[ri] += std::norm(s.e_g - p) / (2.0 * r * r);
          s.inside = false;
        } else {
          s.inside = true;
          s.seen_x = false;
          s.e_g = p;
        }
      }
    }
  }
  // records still open at the path end close at the endpoint (an excursion
  // delimited by the trajectory end per the endpoint convention)
  const Point pe = whole.pos.back();
  const bool end_is_x = pe == x;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    auto& s = st[ri];
    if (s.inside && !s.seen_x && !end_is_x)
      out[ri] += std::norm(s.e_g - pe) / (2.0 * radii[ri] * radii[ri]);
  }
  return out;
}

double RnEstimates::combined_se() const {
  return std::sqrt(q_se * q_se + p_se * p_se);
}

RnEstimates rn_consistency_test(const QConfig& cfg, const ExcursionEvent& event,
                                long replicates, std::uint64_t seed,
                                std::uint64_t stream) {
  if (cfg.D1.kind() != DomainKind::Disk || cfg.D1.center() != cfg.x)
    throw std::invalid_argument(
        "rn_consistency_test: D1 must be a disk centered at x");
  const double r1 = cfg.D1.radius();
  const double norm = std::exp(-cfg.alpha * capacity(cfg.D, cfg.x)) *
                      xi(cfg.D, cfg.x, cfg.z, cfg.zp);

  // Q-direct: sample the tilted bundle with truncation S = D1 (loops that
  // stay inside D1 do not change the excursion data of F^+_{D1})
  const Welford q = mc_run(
      seed, stream, replicates,
      [&](Rng& rng, long long) -> double {
        QPathBundle b = sample_q(cfg.D, cfg.z, cfg.zp, cfg.x, cfg.alpha, r1,
                                 cfg.h, rng);
        const PathSample whole = b.concatenated();
        const auto records = excursions_inside(whole, cfg.D1, cfg.x);
        return event(records) ? 1.0 : 0.0;
      });

  // weighted estimate under the plain conditioned law
  ConditioningSpec spec;
  if (cfg.D.classify(cfg.zp) == PointClass::Boundary) {
    spec.mode = ConditioningSpec::Mode::ExitAtBoundaryPoint;
  } else {
    spec.mode = ConditioningSpec::Mode::HitPoint;
    spec.gate_radius = 0.25 * std::min(std::abs(cfg.zp - cfg.x),
                                       cfg.D.boundary_distance(cfg.zp));
  }
  spec.target = cfg.zp;
  const double cap1 = capacity(cfg.D1, cfg.x);
  const Welford p = mc_run(
      seed, stream + 1, replicates,
      [&](Rng& rng, long long) -> double {
        const PathSample path =
            sample_conditioned(cfg.D, cfg.z, spec, cfg.h, rng);
        const auto records = excursions_inside(path, cfg.D1, cfg.x);
        if (!event(records)) return 0.0;
        const auto xs = xi_values_for(cfg.D1, cfg.x, records);
        return martingale_weight({xs, cfg.alpha, cap1}) / norm;
      });

  RnEstimates out;
  out.q_direct = q.mean;
  out.q_se = q.std_error();
  out.p_weighted = p.mean;
  out.p_se = p.std_error();
  return out;
}

}  // namespace thickpoints
