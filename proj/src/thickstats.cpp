#include "thickpoints/thickstats.hpp"

#include <algorithm>
#include <cmath>

namespace thickpoints {

std::vector<double> occupation_ratio(const PathSample& path, Point x,
                                     const std::vector<double>& radii,
                                     double t) {
  std::vector<double> occ(radii.size(), 0.0);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (path.times[i] >= t) break;
    const double tb = std::min(path.times[i + 1], t);
    const double dt = tb - path.times[i];
    if (dt <= 0) continue;
    const double frac = (tb - path.times[i]) /
                        (path.times[i + 1] - path.times[i]);
    const Point a = path.pos[i];
    const Point bfull = path.pos[i + 1];
    const Point b = a + frac * (bfull - a);
    for (std::size_t ri = 0; ri < radii.size(); ++ri) {
      const double r = radii[ri];
      const double da = std::abs(a - x), db = std::abs(b - x);
      if (da < r && db < r) {
        occ[ri] += dt;
      } else if (da < r || db < r) {
        // one crossing: exact quadratic root along the segment
        const Point d = b - a, f = a - x;
        const double A = std::norm(d);
        const double B = 2.0 * (f.real() * d.real() + f.imag() * d.imag());
        const double C = std::norm(f) - r * r;
        const double disc = B * B - 4 * A * C;
        if (disc >= 0 && A > 0) {
          const double sd = std::sqrt(disc);
          double tc = (da < r) ? (-B + sd) / (2 * A) : (-B - sd) / (2 * A);
          tc = std::clamp(tc, 0.0, 1.0);
          occ[ri] += dt * (da < r ? tc : 1.0 - tc);
        } else {
          occ[ri] += 0.5 * dt;
        }
      }
      // both outside: sub-resolution dips ignored
    }
  }
  std::vector<double> out(radii.size());
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const double lr = std::log(radii[ri]);
    out[ri] = occ[ri] / (radii[ri] * radii[ri] * lr * lr);
  }
  return out;
}

XProcess x_process(double beta, const std::vector<double>& t_grid, Rng& rng) {
  if (!(beta > 0)) throw std::invalid_argument("x_process: beta <= 0");
  XProcess xp;
  xp.beta = beta;
  xp.t_grid = t_grid;
  xp.values.assign(t_grid.size(), 0.0);
  const double t_max = t_grid.empty() ? 0.0 : t_grid.back();
  const int k = rng.poisson(beta * t_max);
  xp.arrivals.resize(k);
  for (auto& u : xp.arrivals) u = rng.uniform_in(0.0, t_max);
  std::sort(xp.arrivals.begin(), xp.arrivals.end());
  for (const double u : xp.arrivals) {
    std::vector<double> offsets;
    offsets.reserve(t_grid.size());
    for (const double t : t_grid)
      if (t > u) offsets.push_back(t - u);
    if (offsets.empty()) continue;
    const BesqSample besq = sample_besq(4, 0.0, offsets, rng);
    std::size_t j = t_grid.size() - offsets.size();
    for (std::size_t i = 0; i < offsets.size(); ++i, ++j)
      xp.values[j] += besq.values[i];
  }
  return xp;
}

GoodEventReport good_event(const QPathBundle& b, Point z, Point zp, double r0,
                           double gamma) {
  GoodEventReport rep;
  rep.r0 = r0;
  rep.gamma = gamma;
  // distance requirement d(x, {z, z'}) > r0; the domain boundary distance is
  // the caller's responsibility (the bundle does not carry the domain)
  rep.distance_ok = std::abs(b.x - z) > r0 && std::abs(b.x - zp) > r0;

  const auto counts = b.loop_crossing_counts();
  const auto ups = bundle_upsilon(b);
  rep.all_ok = rep.distance_ok;
  for (std::size_t i = 0; i < b.ladder.radii.size(); ++i) {
    const double r = b.ladder.radii[i];
    if (r > r0) continue;
    rep.radii.push_back(r);
    const double lg = std::log(1.0 / r);
    const bool n_ok = static_cast<double>(counts[i]) <= gamma * lg;
    const bool u_ok = ups[i] <= gamma * lg * lg;
    rep.n_ok.push_back(n_ok);
    rep.upsilon_ok.push_back(u_ok);
    rep.all_ok = rep.all_ok && n_ok && u_ok;
  }
  return rep;
}

double field_sum_sq(const MeasureField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.masses.size(); ++i)
    if (!f.clipped[i]) s += f.masses[i] * f.masses[i];
  return s;
}

DimensionEstimate correlation_dimension(
    const std::vector<int>& levels,
    const std::vector<std::vector<double>>& sum_sq_per_level, Rng& rng,
    int bootstrap) {
  if (levels.size() < 2 || levels.size() != sum_sq_per_level.size())
    throw std::invalid_argument("correlation_dimension: need >= 2 levels");
  DimensionEstimate est;
  est.levels = levels;

  auto fit_dim = [&](const std::vector<double>& means) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (!(means[i] > 0))
        throw std::invalid_argument("correlation_dimension: degenerate field");
      xs.push_back(levels[i] * std::log(2.0));
      ys.push_back(std::log(means[i]));
    }
    return -linear_fit(xs, ys).slope;
  };

  std::vector<double> means(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double s = 0.0;
    for (const double v : sum_sq_per_level[i]) s += v;
    means[i] = s / static_cast<double>(sum_sq_per_level[i].size());
    est.log_mean_sum_sq.push_back(std::log(means[i]));
  }
  est.dimension = fit_dim(means);

  // bootstrap over replicates (resampling the same indices across levels:
  // the replicate is the shared realization)
  std::vector<double> dims;
  const std::size_t n = sum_sq_per_level.front().size();
  for (int bidx = 0; bidx < bootstrap; ++bidx) {
    std::vector<double> bm(levels.size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t pick =
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      for (std::size_t i = 0; i < levels.size(); ++i)
        bm[i] += sum_sq_per_level[i][std::min(pick, n - 1)];
    }
    for (auto& v : bm) v /= static_cast<double>(n);
    bool ok = true;
    for (const double v : bm) ok = ok && v > 0;
    if (ok) dims.push_back(fit_dim(bm));
  }
  std::sort(dims.begin(), dims.end());
  if (!dims.empty()) {
    est.ci_lo = dims[static_cast<std::size_t>(0.025 * dims.size())];
    est.ci_hi = dims[std::min(dims.size() - 1,
                              static_cast<std::size_t>(0.975 * dims.size()))];
  }
  return est;
}

}  // namespace thickpoints
