#pragma once

#include <optional>
#include <vector>

#include "thickpoints/harmonic.hpp"
#include "thickpoints/rng.hpp"

namespace thickpoints {

enum class TerminalEvent { HitTarget, ExitedDomain };

// Time-stamped polyline approximating a (conditioned) Brownian trajectory.
struct PathSample {
  std::vector<double> times;
  std::vector<Point> pos;
  double step = 0.0;  // base time step
  TerminalEvent terminal = TerminalEvent::ExitedDomain;
  // indices where the path sits exactly at a conditioning target (= hits of
  // the point the path was steered to, consumed as hits-x markers)
  std::vector<std::size_t> target_hits;

  std::size_t size() const { return pos.size(); }
  Point start() const { return pos.front(); }
  Point end() const { return pos.back(); }
  double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }
};

struct ConditioningSpec {
  enum class Mode { KillAtBoundary, HitPoint, ExitAtBoundaryPoint };
  Mode mode = Mode::KillAtBoundary;
  Point target{0, 0};
  // hit-point decision gate radius; every observed circle must stay outside
  // twice this radius; 0 = 1e-3 * diam(D)
  double gate_radius = 0.0;
  // exit-mode snap distance; 0 = 1e-6 * diam(D)
  double snap_radius = 0.0;
  // inward offset for boundary starts; 0 = 1e-4 * diam(D)
  double boundary_offset = 0.0;
};

// Registered concentric observation circles; the sampler marks which radii
// the path reached (geometric crossing or Brownian-bridge graze).
struct CircleLadder {
  Point center{0, 0};
  std::vector<double> radii;  // ascending
};

struct SamplerOptions {
  const CircleLadder* ladder = nullptr;
  // OR-ed hit flags per ladder radius (resized by the sampler)
  std::vector<char>* ladder_hits = nullptr;
  double adapt = 0.08;  // relative spatial step near singular targets
  long max_steps = 50'000'000;
};

// Brownian motion killed at the boundary; Euler steps with bridge-corrected
// exit detection, terminal point projected onto the boundary.
PathSample sample_killed_bm(const NiceDomain& D, Point start, double h,
                            Rng& rng, const SamplerOptions& opt = {});

// Doob h-transform samplers: hit-point (h = G_D(x, .)) or exit at a boundary
// point (h = H_D(., z')). Boundary starts are offset along the inward normal.
PathSample sample_conditioned(const NiceDomain& D, Point z,
                              const ConditioningSpec& spec, double h, Rng& rng,
                              const SamplerOptions& opt = {});

// One loop from nu_D(x,x) conditioned to escape D1 (a disk around x): exit
// point on the boundary of D1 from the exact density G_D(x,y) H_{D1}(x,y),
// out-segment the time reversal of a conditioned path y -> x inside D1,
// return segment an independent conditioned path y -> x in D.
PathSample sample_loop_escaping(const NiceDomain& D, Point x,
                                const NiceDomain& D1, double h, Rng& rng,
                                const SamplerOptions& opt = {});

struct BesqSample {
  std::vector<double> times;
  std::vector<double> values;
  int dimension = 2;
};

// Squared Bessel process by exact noncentral chi-square transitions.
BesqSample sample_besq(int dimension, double start,
                       const std::vector<double>& times, Rng& rng);

PathSample reverse_path(const PathSample& p);
// joins parts whose endpoints coincide; target-hit markers carried over
PathSample concatenate_paths(const std::vector<const PathSample*>& parts);

}  // namespace thickpoints
