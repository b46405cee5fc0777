#include "thickpoints/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "thickpoints/fdsolve.hpp"
#include "thickpoints/weights.hpp"

namespace thickpoints {

using nlohmann::json;

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

std::string ExperimentConfig::to_json() const {
  json j;
  j["domain"] = json::parse(domain.to_json());
  j["z"] = {z.real(), z.imag()};
  j["zp"] = {zp.real(), zp.imag()};
  j["x"] = {x.real(), x.imag()};
  j["alpha"] = alpha;
  j["mesh_min"] = mesh_min;
  j["mesh_max"] = mesh_max;
  j["step"] = step;
  j["r_min"] = r_min;
  j["replicates"] = replicates;
  j["seed"] = seed;
  j["tests"] = tests;
  j["threads"] = threads;
  j["replicate_scale"] = replicate_scale;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  auto pt = [&](const char* k, Point dflt) {
    if (!j.contains(k)) return dflt;
    return Point(j[k][0].get<double>(), j[k][1].get<double>());
  };
  if (j.contains("domain")) c.domain = NiceDomain::from_json(j["domain"].dump());
  c.z = pt("z", c.z);
  c.zp = pt("zp", c.zp);
  c.x = pt("x", c.x);
  if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
  if (j.contains("mesh_min")) c.mesh_min = j["mesh_min"].get<int>();
  if (j.contains("mesh_max")) c.mesh_max = j["mesh_max"].get<int>();
  if (j.contains("step")) c.step = j["step"].get<double>();
  if (j.contains("r_min")) c.r_min = j["r_min"].get<double>();
  if (j.contains("replicates")) c.replicates = j["replicates"].get<long>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tests")) c.tests = j["tests"].get<std::vector<std::string>>();
  if (j.contains("threads")) c.threads = j["threads"].get<int>();
  if (j.contains("replicate_scale"))
    c.replicate_scale = j["replicate_scale"].get<double>();
  return c;
}

void ExperimentConfig::validate() const {
  if (z == zp) throw ConfigError("config: z and z' must be distinct");
  for (const Point p : {z, zp}) {
    const auto c = domain.classify(p);
    if (c == PointClass::Outside)
      throw ConfigError("config: z/z' must be nice points of the closure");
  }
  if (x == z || x == zp) throw ConfigError("config: x must differ from z, z'");
  if (domain.classify(x) != PointClass::Interior)
    throw ConfigError("config: x must be interior");
  if (domain.kind() != DomainKind::MobiusImage &&
      !is_suitable(x, domain, z, zp, mesh_max))
    throw ConfigError("config: x not suitable (grid line up to mesh_max)");
  if (!(step > 0)) throw ConfigError("config: step must be positive");
  if (!(r_min > 0)) throw ConfigError("config: r_min must be positive");
  if (!(alpha >= 0)) throw ConfigError("config: alpha must be >= 0");
}

long ExperimentConfig::scaled(long pinned) const {
  if (replicates > 0) return replicates;
  const double s = replicate_scale > 0 ? replicate_scale : 1.0;
  return std::max<long>(50, static_cast<long>(pinned * s));
}

// ---------------------------------------------------------------------------
// registry helpers
// ---------------------------------------------------------------------------

namespace {

TestResult make_result(const std::string& id, const std::string& anchor) {
  TestResult r;
  r.id = id;
  r.anchor = anchor;
  return r;
}

void finish_mc(TestResult& r, double analytic, const Welford& w) {
  r.analytic = analytic;
  r.estimate = w.mean;
  r.std_error = w.std_error();
  r.z_score = r.std_error > 0 ? (r.estimate - analytic) / r.std_error : 0.0;
  r.pass = std::abs(r.estimate - analytic) <= 3.0 * r.std_error;
}

char buf_text[256];
std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  std::snprintf(buf_text, sizeof(buf_text), f, a, b, c);
  return buf_text;
}

// ---------------------------------------------------------------------------
// kernel exactness
// ---------------------------------------------------------------------------

TestResult t_kernels_disk(const ExperimentConfig& cfg) {
  auto r = make_result("kernels_disk_exact",
                       "disk closed forms: H(0,b)=1/2pi, H(a,b), "
                       "bb=1/(pi|b-b'|^2), G(0,y)=log 1/|y|, C(a)=-log(1-|a|^2)");
  const auto D = NiceDomain::unit_disk();
  double err = 0.0;
  auto track = [&](double got, double want) {
    err = std::max(err, std::abs(got - want) / std::max(1.0, std::abs(want)));
  };
  track(poisson_kernel(D, Point(0, 0), Point(1, 0)), 1.0 / kTwoPi);
  track(poisson_kernel(D, Point(0.5, 0), Point(1, 0)), 3.0 / kTwoPi);
  track(boundary_poisson_kernel(D, Point(1, 0), Point(-1, 0)),
        1.0 / (4.0 * kPi));
  track(green(D, Point(0, 0), Point(0.5, 0)), std::log(2.0));
  track(xi(D, Point(0, 0), Point(0.5, 0), Point(-0.5, 0)),
        sq(std::log(2.0)) / std::log(1.25));
  track(xi(D, Point(0, 0), Point(1, 0), Point(-1, 0)), 2.0);
  track(capacity(D, Point(0.5, 0)), -std::log(0.75));
  track(capacity_gap(D, NiceDomain::disk(Point(0, 0), 0.1), Point(0, 0)),
        std::log(10.0));
  r.analytic = 0.0;
  r.estimate = err;
  r.pass = err < 1e-10;
  r.note = fmt("max rel err %.3g", err);
  return r;
}

TestResult t_xi_invariance(const ExperimentConfig& cfg) {
  auto r = make_result("kernels_xi_invariance",
                       "xi_D(x,z,z') invariant under disk automorphisms");
  const auto D = NiceDomain::unit_disk();
  Rng rng = Rng::substream(cfg.seed, hash64("xi_invariance"));
  double err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double rr = 0.8 * std::sqrt(rng.uniform());
    const MobiusMap m(std::polar(rr, kTwoPi * rng.uniform()),
                      std::polar(1.0, kTwoPi * rng.uniform()));
    const Point x = std::polar(0.9 * std::sqrt(rng.uniform()),
                               kTwoPi * rng.uniform());
    Point z, zp;
    const int mode = i % 3;
    z = (mode == 0) ? std::polar(1.0, kTwoPi * rng.uniform())
                    : std::polar(0.9 * std::sqrt(rng.uniform()),
                                 kTwoPi * rng.uniform());
    zp = (mode != 2) ? std::polar(1.0, kTwoPi * rng.uniform())
                     : std::polar(0.9 * std::sqrt(rng.uniform()),
                                  kTwoPi * rng.uniform());
    if (std::abs(z - zp) < 2e-2 || std::abs(z - x) < 2e-2 ||
        std::abs(zp - x) < 2e-2) continue;
    auto push = [&](Point p) {
      Point q = m.map(p);
      if (D.is_boundary(p)) q /= std::abs(q);
      return q;
    };
    const double a = xi(D, x, z, zp);
    const double b = xi(D, push(x), push(z), push(zp));
    err = std::max(err, std::abs(a - b) / std::abs(a));
  }
  r.analytic = 0.0;
  r.estimate = err;
  r.pass = err < 1e-10;
  r.note = fmt("max rel err %.3g over 100 maps", err);
  return r;
}

TestResult t_rect_symmetry(const ExperimentConfig& cfg) {
  auto r = make_result("rect_green_symmetry", "G_D(x,y) = G_D(y,x)");
  const auto R = NiceDomain::rect(0, 0, 1, 1);
  Rng rng = Rng::substream(cfg.seed, hash64("rect_symmetry"));
  double err = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Point x(0.03 + 0.94 * rng.uniform(), 0.03 + 0.94 * rng.uniform());
    const Point y(0.03 + 0.94 * rng.uniform(), 0.03 + 0.94 * rng.uniform());
    if (std::abs(x - y) < 1e-3) continue;
    err = std::max(err, std::abs(green(R, x, y) - green(R, y, x)));
  }
  r.analytic = 0.0;
  r.estimate = err;
  r.pass = err < 1e-10;
  return r;
}

TestResult t_rect_fd(const ExperimentConfig& cfg) {
  auto r = make_result("rect_green_fd",
                       "image-series G vs 5-point discrete Dirichlet solve");
  const auto R = NiceDomain::rect(0, 0, 1, 1);
  const int n = cfg.replicate_scale >= 1.0 ? 2048 : 256;
  FdPoissonOracle fd(R, n);
  Rng rng = Rng::substream(cfg.seed, hash64("rect_fd"));
  double err = 0.0;
  for (int i = 0; i < 20; ++i) {
    Point x(0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform());
    Point y(0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform());
    if (std::abs(x - y) < 0.1) {
      --i;
      continue;
    }
    x = fd.set_source(x);
    y = fd.snap(y);
    err = std::max(err, std::abs(fd.value_at(y) - green(R, x, y)));
  }
  r.analytic = 0.0;
  r.estimate = err;
  r.pass = err < (n >= 2048 ? 1e-3 : 5e-3);
  r.note = fmt("max abs err %.3g on %g^2 grid", err, n);
  return r;
}

// ---------------------------------------------------------------------------
// hitting identities (conditioned hit-order probabilities)
// ---------------------------------------------------------------------------

struct HitCfg {
  const char* id;
  NiceDomain D;
  NiceDomain D1;  // disk centered at x
  Point z, x;
};

TestResult run_hitting(const ExperimentConfig& cfg, const HitCfg& hc) {
  auto r = make_result(hc.id, "P(T_x <= T_dD1) = H_D1(z,x) / H_D(z,x)");
  const double analytic =
      green(hc.D1, hc.z, hc.x) / green(hc.D, hc.z, hc.x);
  const double r1 = hc.D1.radius();
  CircleLadder ladder{hc.x, {r1}};
  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = hc.x;
  spec.gate_radius = 0.3 * r1;
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64(hc.id), n,
      [&](Rng& rng, long long) -> double {
        std::vector<char> hits;
        SamplerOptions opt;
        opt.ladder = &ladder;
        opt.ladder_hits = &hits;
        const PathSample p =
            sample_conditioned(hc.D, hc.z, spec, cfg.step, rng, opt);
        return (p.terminal == TerminalEvent::HitTarget && !hits[0]) ? 1.0 : 0.0;
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  if (cfg.replicate_scale >= 1.0 && cfg.replicates == 0)
    r.pass = r.pass && r.std_error <= 0.006;
  return r;
}

// ---------------------------------------------------------------------------
// excursion-weight identities E[e_L(xi)] = xi_D(x,z,z') C^{L-1}
// ---------------------------------------------------------------------------

struct WeightCfg {
  const char* id;
  NiceDomain D;
  NiceDomain D1;
  Point z, zp, x;
  int L;
};

TestResult run_eq_weight(const ExperimentConfig& cfg, const WeightCfg& wc) {
  auto r = make_result(
      wc.id, "E[sum over L-sets of prod xi_D1] = xi_D(x,z,z') C_{D,D1}^{L-1}");
  const double analytic =
      xi(wc.D, wc.x, wc.z, wc.zp) *
      std::pow(capacity_gap(wc.D, wc.D1, wc.x), wc.L - 1);
  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = wc.zp;
  spec.gate_radius =
      0.25 * std::min(std::abs(wc.zp - wc.x), wc.D.boundary_distance(wc.zp));
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64(wc.id), n,
      [&](Rng& rng, long long) -> double {
        const PathSample p =
            sample_conditioned(wc.D, wc.z, spec, cfg.step, rng);
        const auto records = excursions_inside(p, wc.D1, wc.x);
        const auto xs = xi_values_for(wc.D1, wc.x, records);
        if (wc.L == 1) {
          double s = 0.0;
          for (const double v : xs) s += v;
          return s;
        }
        const auto e = elementary_symmetric(xs);
        return static_cast<std::size_t>(wc.L) < e.size() ? e[wc.L] : 0.0;
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  return r;
}

// ---------------------------------------------------------------------------
// the four-expectation identities at L = 1
// ---------------------------------------------------------------------------

TestResult t_lemma_zx(const ExperimentConfig& cfg) {
  auto r = make_result("identity_zx",
                       "E^{z,x}[sum xi 1{e_g != z, e_d != x}] = "
                       "(1 - H_D1(x,z)/H_D(x,z)) C_{D,D1}");
  const auto D = NiceDomain::unit_disk();
  const Point x(0, 0), z(0.2, 0.1);
  const auto D1 = NiceDomain::disk(x, 0.5);
  const double analytic =
      (1.0 - green(D1, x, z) / green(D, x, z)) * capacity_gap(D, D1, x);
  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = x;
  spec.gate_radius = 0.15;
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64("identity_zx"), n,
      [&](Rng& rng, long long) -> double {
        const PathSample p = sample_conditioned(D, z, spec, cfg.step, rng);
        const auto records = excursions_inside(p, D1, x);
        double s = 0.0;
        for (const auto& rec : records) {
          if (rec.e_g == z || rec.e_d == x || rec.e_g == x) continue;
          s += xi(D1, x, rec.e_g, rec.e_d);
        }
        return s;
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  return r;
}

TestResult t_lemma_loops(const ExperimentConfig& cfg) {
  auto r = make_result("identity_loops",
                       "nu-conditioned loops: E[sum xi 1{endpoints != x}] = "
                       "C_{D,D1}(x)");
  const auto D = NiceDomain::unit_disk();
  const Point x(0, 0);
  const auto D1 = NiceDomain::disk(x, 0.5);
  const double analytic = capacity_gap(D, D1, x);
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64("identity_loops"), n,
      [&](Rng& rng, long long) -> double {
        const PathSample loop =
            sample_loop_escaping(D, x, D1, cfg.step, rng);
        const auto records = excursions_inside(loop, D1, x);
        double s = 0.0;
        for (const auto& rec : records) {
          if (rec.e_g == x || rec.e_d == x) continue;
          s += xi(D1, x, rec.e_g, rec.e_d);
        }
        return s;
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  return r;
}

TestResult t_lemma_zz(const ExperimentConfig& cfg) {
  auto r = make_result("identity_zz",
                       "loops at z: nu_D(z,z)[sum xi_D1(x,.)] = "
                       "(2pi)^2 (H_D(x,z) - H_D1(x,z))^2");
  const auto D = NiceDomain::unit_disk();
  const Point x(0, 0), z(0.7, 0.0);
  const auto D1 = NiceDomain::disk(x, 0.35);
  const auto Sz = NiceDomain::disk(z, 0.12);
  const double hd = kernel_H(D, x, z);
  const double analytic = sq(kTwoPi) * sq(hd);  // H_D1(x,z) = 0, z outside D1
  const double mass = capacity_gap(D, Sz, z);
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64("identity_zz"), n,
      [&](Rng& rng, long long) -> double {
        const PathSample loop = sample_loop_escaping(D, z, Sz, cfg.step, rng);
        const auto records = excursions_inside(loop, D1, x);
        double s = 0.0;
        for (const auto& rec : records) {
          if (rec.e_g == z || rec.e_d == z) continue;
          s += xi(D1, x, rec.e_g, rec.e_d);
        }
        return s * mass;
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  return r;
}

TestResult t_eq310(const ExperimentConfig& cfg) {
  auto r = make_result("identity_single_crossing",
                       "E^{z,z'}[sum xi_D1(x, e_g, e_d)] = xi_D(x,z,z')");
  const auto D = NiceDomain::unit_disk();
  const Point x(0, 0), z(0.8, 0.0), zp(-0.72, 0.15);
  const auto D1 = NiceDomain::disk(x, 0.4);
  const double analytic = xi(D, x, z, zp);
  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = zp;
  spec.gate_radius = 0.1;
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64("identity_single_crossing"), n,
      [&](Rng& rng, long long) -> double {
        const PathSample p = sample_conditioned(D, z, spec, cfg.step, rng);
        const auto records = excursions_inside(p, D1, x);
        double s = 0.0;
        for (const auto& rec : records) s += xi(D1, x, rec.e_g, rec.e_d);
        return s;
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  return r;
}

// ---------------------------------------------------------------------------
// Radon-Nikodym consistency
// ---------------------------------------------------------------------------

QConfig rn_config(const ExperimentConfig& cfg) {
  QConfig q;
  q.D = NiceDomain::unit_disk();
  q.x = Point(0, 0);
  q.D1 = NiceDomain::disk(q.x, 0.35);
  q.z = Point(0.75, 0.0);
  q.zp = Point(-0.72, 0.15);
  q.alpha = 0.8;
  q.h = cfg.step;
  return q;
}

TestResult run_rn(const ExperimentConfig& cfg, const char* id,
                  const ExcursionEvent& event, bool expect_one) {
  auto r = make_result(
      id, "dQ/dP on F+_D1 = M_D1(x,a) / (e^{-a C_D} xi_D(x,z,z'))");
  const QConfig q = rn_config(cfg);
  const long n = cfg.scaled(100000);
  const RnEstimates est =
      rn_consistency_test(q, event, n, cfg.seed, hash64(id));
  r.analytic = expect_one ? 1.0 : est.q_direct;
  r.estimate = est.p_weighted;
  r.std_error = est.combined_se();
  const double gap = est.gap();
  r.z_score = r.std_error > 0 ? gap / r.std_error : 0.0;
  r.pass = std::abs(gap) <= 3.0 * r.std_error;
  if (expect_one)
    r.pass = r.pass && std::abs(est.q_direct - 1.0) <= 3.0 * est.q_se &&
             std::abs(est.p_weighted - 1.0) <= 3.0 * est.p_se;
  r.note = fmt("Q-direct %.4f, P-weighted %.4f", est.q_direct, est.p_weighted);
  return r;
}

// ---------------------------------------------------------------------------
// martingale structure across mesh levels
// ---------------------------------------------------------------------------

TestResult t_martingale(const ExperimentConfig& cfg) {
  auto r = make_result("martingale_structure",
                       "E[field mass | coarser excursion data] keeps the "
                       "coarser mass: means constant over levels 1..3");
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point z(0.2137, 0.3211), zp(0.7823, 0.6177);
  Rng orng = Rng::substream(cfg.seed, hash64("martingale_offset"));
  const double omax = std::ldexp(1.0, -5);
  const Point offset(omax * orng.uniform(), omax * orng.uniform());
  const double ax0 = offset.real(), ay0 = offset.imag();
  const std::vector<double> alphas{0.0, 0.5, 1.0};
  const double h = std::min(cfg.step, sq(std::ldexp(1.0, -3)) / 100.0);

  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = zp;
  spec.gate_radius = 0.02;

  const long n = cfg.scaled(10000);
  // per alpha: the three level masses and the two paired increments
  const int d = static_cast<int>(alphas.size()) * 5;
  const auto stats = mc_run_vec(
      cfg.seed, hash64("martingale_structure"), n, d,
      [&](Rng& rng, long long, double* out) {
        const PathSample p = sample_conditioned(D, z, spec, h, rng);
        for (int lev = 1; lev <= 3; ++lev) {
          const auto part = grid_partition(D, lev, offset);
          const auto fields = build_fields(p, part, alphas);
          for (std::size_t ai = 0; ai < alphas.size(); ++ai)
            out[ai * 5 + (lev - 1)] =
                fields[ai].mass_in_rect(ax0, ay0, ax0 + 0.5, ay0 + 0.5);
        }
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          out[ai * 5 + 3] = out[ai * 5 + 1] - out[ai * 5];
          out[ai * 5 + 4] = out[ai * 5 + 2] - out[ai * 5 + 1];
        }
      },
      cfg.threads);

  double max_z = 0.0, min_p = 1.0;
  std::string note;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    for (int k = 3; k <= 4; ++k) {
      const auto& w = stats[ai * 5 + k];
      const double zsc = w.std_error() > 0 ? w.mean / w.std_error() : 0.0;
      max_z = std::max(max_z, std::abs(zsc));
      min_p = std::min(min_p, mean_zero_pvalue(w));
    }
    note += fmt("a=%.1f m=(%.4f,", alphas[ai], stats[ai * 5].mean);
    note += fmt("%.4f,%.4f) ", stats[ai * 5 + 1].mean, stats[ai * 5 + 2].mean);
  }
  r.analytic = 0.0;
  r.estimate = max_z;
  r.std_error = 1.0;
  r.z_score = max_z;
  r.pass = max_z <= 3.0 && min_p >= 0.001;
  r.note = note + fmt("min increment p=%.4f", min_p);
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    PlotSeries s;
    s.name = fmt("mass_alpha_%.1f", alphas[ai]);
    for (int lev = 1; lev <= 3; ++lev) {
      s.xs.push_back(lev);
      s.ys.push_back(stats[ai * 5 + (lev - 1)].mean);
    }
    s.annotation = "mean field mass vs level";
    r.plots.push_back(s);
  }
  return r;
}

TestResult t_positivity(const ExperimentConfig& cfg) {
  auto r = make_result("positivity_sanity",
                       "P(total interior field mass > 0) = 1 at fixed level");
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point z(0.2137, 0.3211), zp(0.7823, 0.6177);
  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = zp;
  spec.gate_radius = 0.02;
  const double h = std::min(cfg.step, sq(0.25) / 100.0);
  const long n = cfg.scaled(2000);
  const Welford w = mc_run(
      cfg.seed, hash64("positivity_sanity"), n,
      [&](Rng& rng, long long) -> double {
        const PathSample p = sample_conditioned(D, z, spec, h, rng);
        const auto part = grid_partition(D, 2);
        const auto f = build_field(p, part, 1.0);
        return f.total_mass() > 0 ? 1.0 : 0.0;
      },
      cfg.threads);
  r.analytic = 1.0;
  r.estimate = w.mean;
  r.std_error = w.std_error();
  r.pass = w.mean == 1.0;
  return r;
}

// ---------------------------------------------------------------------------
// weights oracle and bound
// ---------------------------------------------------------------------------

double brute_force_weight(const std::vector<double>& xs, double alpha,
                          double cap) {
  const std::size_t n = xs.size();
  double sum = 0.0;
  for (std::size_t mask = 1; mask < (1u << n); ++mask) {
    double prod = 1.0;
    int L = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) {
        prod *= xs[j];
        ++L;
      }
    double coef = 1.0;
    for (int i = 1; i < L; ++i) coef *= alpha / i;
    sum += coef * prod;
  }
  return std::exp(-alpha * cap) * sum;
}

TestResult t_weight_oracle(const ExperimentConfig& cfg) {
  auto r = make_result("weight_oracle",
                       "series evaluation of M equals subset enumeration");
  Rng rng = Rng::substream(cfg.seed, hash64("weight_oracle"));
  double err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 6.0);
    std::vector<double> xs(n);
    for (auto& v : xs) v = 4.0 * rng.uniform();
    const double alpha = 2.0 * rng.uniform();
    const double cap = 2.0 * rng.uniform();
    const double a = martingale_weight({xs, alpha, cap});
    const double b = brute_force_weight(xs, alpha, cap);
    err = std::max(err, std::abs(a - b) / std::max(1e-300, std::abs(b)));
  }
  r.analytic = 0.0;
  r.estimate = err;
  r.pass = err < 1e-12;
  r.note = fmt("max rel err %.3g over 1000 sets", err);
  return r;
}

TestResult t_weight_bound(const ExperimentConfig& cfg) {
  auto r = make_result("weight_bound",
                       "M <= Upsilon e^{-a C} e^{2 sqrt(a Upsilon)}");
  Rng rng = Rng::substream(cfg.seed, hash64("weight_bound"));
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform() * 14.0);
    std::vector<double> xs(n);
    double ups = 0.0;
    for (auto& v : xs) {
      v = 4.0 * rng.uniform();
      ups += v;
    }
    const double alpha = 2.0 * rng.uniform();
    const double cap = 2.0 * rng.uniform();
    const double m = martingale_weight({xs, alpha, cap});
    const double bound = truncated_weight_bound(ups, alpha, cap);
    worst = std::max(worst, m / bound);
    ok = ok && m <= bound * (1.0 + 1e-12);
  }
  r.analytic = 1.0;
  r.estimate = worst;
  r.pass = ok;
  r.note = fmt("max M/bound = %.4f over 10^4 inputs", worst);
  return r;
}

// ---------------------------------------------------------------------------
// loop-soup ladder statistics
// ---------------------------------------------------------------------------

TestResult run_loop_stats(const ExperimentConfig& cfg, const char* id,
                          double alpha) {
  auto r = make_result(
      id, "loop counts N(x,e^-k) ~ a k and Upsilon(x,e^-k) ~ a k^2");
  const auto D = NiceDomain::unit_disk();
  const Point x(0, 0);
  const Point z = std::polar(0.8, 2.1), zp = std::polar(0.8, -0.4);
  const int kmax = 12;
  std::vector<double> radii;
  for (int k = kmax; k >= 1; --k) radii.push_back(std::exp(-double(k)));
  const double r_min = radii.front();

  const long n = cfg.scaled(1000);
  const int d = 2 * kmax;
  const auto stats = mc_run_vec(
      cfg.seed, hash64(id), n, d,
      [&](Rng& rng, long long, double* out) {
        const QPathBundle b =
            sample_q(D, z, zp, x, alpha, r_min, cfg.step, rng, radii);
        const auto counts = b.loop_crossing_counts();
        const auto ups = bundle_upsilon(b);
        for (int k = 0; k < kmax; ++k) {
          out[k] = static_cast<double>(counts[k]);
          out[kmax + k] = ups[k];
        }
      },
      cfg.threads);

  // N: mean count against k (radii ascend => k descends along the vector)
  std::vector<double> ks, nmeans, umeans;
  for (int i = 0; i < kmax; ++i) {
    ks.push_back(static_cast<double>(kmax - i));
    nmeans.push_back(stats[i].mean);
    umeans.push_back(stats[kmax + i].mean);
  }
  const LinearFit nfit = linear_fit(ks, nmeans);

  // Upsilon: a k^2 + b k + c via normal equations; the linear term is the
  // begin/end contribution (mean 2k at this configuration) kept as a
  // nuisance regressor
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, sy = 0, sy1 = 0, sy2 = 0;
  for (int i = 0; i < kmax; ++i) {
    const double k = ks[i], y = umeans[i];
    s0 += 1; s1 += k; s2 += k * k; s3 += k * k * k; s4 += k * k * k * k;
    sy += y; sy1 += k * y; sy2 += k * k * y;
  }
  // solve [s4 s3 s2; s3 s2 s1; s2 s1 s0] [a b c]' = [sy2 sy1 sy]'
  const double m[3][4] = {{s4, s3, s2, sy2}, {s3, s2, s1, sy1}, {s2, s1, s0, sy}};
  double a[3][4];
  std::copy(&m[0][0], &m[0][0] + 12, &a[0][0]);
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int row = col + 1; row < 3; ++row)
      if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
    std::swap(a[col], a[piv]);
    for (int row = 0; row < 3; ++row) {
      if (row == col) continue;
      const double f = a[row][col] / a[col][col];
      for (int cc = col; cc < 4; ++cc) a[row][cc] -= f * a[col][cc];
    }
  }
  const double u_slope = a[0][3] / a[0][0];

  const double n_rel = std::abs(nfit.slope - alpha) / alpha;
  const double u_rel = std::abs(u_slope - alpha) / alpha;
  r.analytic = alpha;
  r.estimate = nfit.slope;
  r.std_error = nfit.slope_se;
  r.z_score = nfit.slope_se > 0 ? (nfit.slope - alpha) / nfit.slope_se : 0.0;
  r.pass = n_rel <= 0.05 && u_rel <= 0.10;
  r.note = fmt("N slope %.4f, Upsilon k^2 coefficient %.4f", nfit.slope, u_slope);
  PlotSeries ns;
  ns.name = std::string(id) + "_N";
  ns.xs = ks;
  ns.ys = nmeans;
  ns.annotation = fmt("fitted slope %.4f", nfit.slope);
  r.plots.push_back(ns);
  PlotSeries us;
  us.name = std::string(id) + "_Upsilon";
  us.xs = ks;
  us.ys = umeans;
  us.annotation = fmt("k^2 coefficient %.4f", u_slope);
  r.plots.push_back(us);
  return r;
}

// ---------------------------------------------------------------------------
// local-time reduction
// ---------------------------------------------------------------------------

TestResult t_besq_moments(const ExperimentConfig& cfg) {
  auto r = make_result("besq_moments", "E U4_s = 4s, Var U4_s = 8 s^2");
  const long n = cfg.scaled(100000);
  const Welford w = mc_run(
      cfg.seed, hash64("besq_moments"), n,
      [&](Rng& rng, long long) -> double {
        return sample_besq(4, 0.0, {1.0}, rng).values[0];
      },
      cfg.threads);
  const double mean_rel = std::abs(w.mean - 4.0) / 4.0;
  const double var_rel = std::abs(w.variance() - 8.0) / 8.0;
  r.analytic = 4.0;
  r.estimate = w.mean;
  r.std_error = w.std_error();
  r.pass = mean_rel <= 0.01 && var_rel <= 0.03;
  r.note = fmt("mean %.4f (4), var %.4f (8)", w.mean, w.variance());
  return r;
}

TestResult run_xprocess(const ExperimentConfig& cfg, const char* id,
                        double beta) {
  auto r = make_result(id, "X_t / t^2 -> 2 beta (poissonized BESQ4 pileup)");
  const double t = 50.0;
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(t * i / 100.0);
  const long n = cfg.scaled(1000);
  const Welford w = mc_run(
      cfg.seed, hash64(id), n,
      [&](Rng& rng, long long) -> double {
        const XProcess xp = x_process(beta, grid, rng);
        return xp.values.back() / (t * t);
      },
      cfg.threads);
  r.analytic = 2.0 * beta;
  r.estimate = w.mean;
  r.std_error = w.std_error();
  r.z_score = (w.mean - r.analytic) / w.std_error();
  r.pass = std::abs(w.mean - 2.0 * beta) / (2.0 * beta) <= 0.05;
  return r;
}

// ---------------------------------------------------------------------------
// alpha = 0 occupation identity
// ---------------------------------------------------------------------------

TestResult t_alpha0(const ExperimentConfig& cfg) {
  auto r = make_result("alpha0_occupation",
                       "zero-tilt field equals pi times the occupation "
                       "measure, cell by cell");
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point z(0.2137, 0.3211), zp(0.7823, 0.6177);
  Rng orng = Rng::substream(cfg.seed, hash64("alpha0_offset"));
  const double omax = std::ldexp(1.0, -5);
  const Point offset(omax * orng.uniform(), omax * orng.uniform());
  const auto part = grid_partition(D, 3, offset);
  const double h = std::min(cfg.step, sq(std::ldexp(1.0, -3)) / 100.0);

  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = zp;
  spec.gate_radius = 0.02;

  const int ncells = static_cast<int>(part.cells.size());
  const long n = cfg.scaled(1000);
  const auto stats = mc_run_vec(
      cfg.seed, hash64("alpha0_occupation"), n, ncells,
      [&](Rng& rng, long long, double* out) {
        const PathSample p = sample_conditioned(D, z, spec, h, rng);
        const auto f = build_field(p, part, 0.0);
        const auto occ = occupation_by_cell(p, part);
        for (int c = 0; c < ncells; ++c)
          out[c] = f.masses[c] - kPi * occ[c];
      },
      cfg.threads);

  int interior = 0, within = 0;
  for (int c = 0; c < ncells; ++c) {
    if (!part.cells[c].square) continue;
    ++interior;
    const auto& w = stats[c];
    if (std::abs(w.mean) <= 3.0 * std::max(w.std_error(), 1e-300)) ++within;
  }
  r.analytic = 1.0;
  r.estimate = interior > 0 ? static_cast<double>(within) / interior : 0.0;
  r.pass = r.estimate >= 0.95;
  r.note = fmt("%g of %g interior cells within 3 SE", within, interior);
  return r;
}

// ---------------------------------------------------------------------------
// spine identity at fixed mesh + conformal pushforward of the mean
// ---------------------------------------------------------------------------

TestResult t_spine(const ExperimentConfig& cfg) {
  auto r = make_result("spine_fixed_mesh",
                       "E[field mass(A)] = int_A e^{-a C_D(x)} xi_D(x,z,z') dx");
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point z(0.2137, 0.3211), zp(0.7823, 0.6177);
  const double alpha = 0.5;
  const int level = 2;
  const auto part = grid_partition(D, level);
  const double ax0 = 0.25, ay0 = 0.25, ax1 = 0.75, ay1 = 0.75;
  const double h = std::min(cfg.step, sq(std::ldexp(1.0, -level)) / 100.0);

  // quadrature of the analytic mean over A (16-point GL per cell)
  double analytic = 0.0;
  {
    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                 0.6521451548625461, 0.3478548451374538};
    const int sub = 8;
    const double hx = (ax1 - ax0) / sub, hy = (ay1 - ay0) / sub;
    for (int i = 0; i < sub; ++i)
      for (int j = 0; j < sub; ++j)
        for (int qi = 0; qi < 4; ++qi)
          for (int qj = 0; qj < 4; ++qj) {
            const Point p(ax0 + (i + 0.5 * (1 + gx[qi])) * hx,
                          ay0 + (j + 0.5 * (1 + gx[qj])) * hy);
            analytic += 0.25 * hx * hy * gw[qi] * gw[qj] *
                        std::exp(-alpha * capacity(D, p)) * xi(D, p, z, zp);
          }
  }

  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = zp;
  spec.gate_radius = 0.02;
  const long n = cfg.scaled(20000);
  const Welford w = mc_run(
      cfg.seed, hash64("spine_fixed_mesh"), n,
      [&](Rng& rng, long long) -> double {
        const PathSample p = sample_conditioned(D, z, spec, h, rng);
        const auto f = build_field(p, part, alpha);
        return f.mass_in_rect(ax0, ay0, ax1, ay1);
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  return r;
}

TestResult t_pushforward(const ExperimentConfig& cfg) {
  auto r = make_result("conformal_pushforward",
                       "pushforward mean density = |Psi'(Psi^{-1})|^{-2-a} "
                       "times the image-configuration density");
  const auto D = NiceDomain::unit_disk();
  const double alpha = 0.7;
  const MobiusMap psi(Point(0.3, -0.2), std::polar(1.0, 0.5));
  const Point z = std::polar(1.0, 0.3), zp = std::polar(1.0, 2.4);
  auto push = [&](Point p) {
    Point q = psi.map(p);
    if (D.is_boundary(p)) q /= std::abs(q);
    return q;
  };
  // deterministic change-of-variables check of the mean densities
  Rng rng = Rng::substream(cfg.seed, hash64("conformal_pushforward"));
  double err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Point y = std::polar(0.9 * std::sqrt(rng.uniform()),
                               kTwoPi * rng.uniform());
    const Point w = psi.inverse(y);
    const double lhs = std::pow(std::abs(psi.derivative(w)), -2.0) *
                       std::exp(-alpha * capacity(D, w)) * xi(D, w, z, zp);
    const double rhs = std::pow(std::abs(psi.derivative(w)), -2.0 - alpha) *
                       std::exp(-alpha * capacity(D, y)) *
                       xi(D, y, push(z), push(zp));
    err = std::max(err, std::abs(lhs - rhs) / std::abs(rhs));
  }
  // MC leg: mean field mass of a disk-interior square under the base law
  const int level = 3;
  const auto part = grid_partition(D, level);
  const double a0 = -0.25, a1 = 0.25;
  double analytic = 0.0;
  {
    const int sub = 24;
    const double hh = (a1 - a0) / sub;
    for (int i = 0; i < sub; ++i)
      for (int j = 0; j < sub; ++j) {
        const Point p(a0 + (i + 0.5) * hh, a0 + (j + 0.5) * hh);
        analytic += hh * hh * std::exp(-alpha * capacity(D, p)) *
                    xi(D, p, z, zp);
      }
  }
  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::ExitAtBoundaryPoint;
  spec.target = zp;
  const double h = std::min(cfg.step, sq(std::ldexp(1.0, -level)) / 100.0);
  const long n = cfg.scaled(20000);
  const Welford w = mc_run(
      cfg.seed, hash64("conformal_pushforward_mc"), n,
      [&](Rng& rng2, long long) -> double {
        const PathSample p = sample_conditioned(D, z, spec, h, rng2);
        const auto f = build_field(p, part, alpha);
        return f.mass_in_rect(a0, a0, a1, a1);
      },
      cfg.threads);
  finish_mc(r, analytic, w);
  r.pass = r.pass && err < 1e-10;
  r.note = fmt("density change-of-variables max rel err %.3g", err);
  return r;
}

// ---------------------------------------------------------------------------
// exploratory correlation dimension
// ---------------------------------------------------------------------------

TestResult t_dimension(const ExperimentConfig& cfg) {
  auto r = make_result("dimension_exploratory",
                       "correlation-sum estimates near 2 - a, decreasing in a "
                       "(exploratory)");
  r.exploratory = true;
  const auto D = NiceDomain::rect(0, 0, 1, 1);
  const Point z(0.2137, 0.3211), zp(0.7823, 0.6177);
  const std::vector<int> levels{3, 4, 5, 6};
  const std::vector<double> alphas{0.5, 1.0, 1.5};
  const double h = std::min(cfg.step, sq(std::ldexp(1.0, -6)) / 100.0);
  const long n = cfg.scaled(120);

  ConditioningSpec spec;
  spec.mode = ConditioningSpec::Mode::HitPoint;
  spec.target = zp;
  spec.gate_radius = 0.02;

  // per replicate: sum of squared masses per (alpha, level), plus the
  // occupation surrogate per level
  const int d = static_cast<int>(alphas.size() * levels.size() + levels.size());
  const auto stats = mc_run_vec(
      cfg.seed, hash64("dimension_exploratory"), n, d,
      [&](Rng& rng, long long, double* out) {
        const PathSample p = sample_conditioned(D, z, spec, h, rng);
        int slot = 0;
        for (const int lev : levels) {
          const auto part = grid_partition(D, lev);
          const auto fields = build_fields(p, part, alphas);
          for (std::size_t ai = 0; ai < alphas.size(); ++ai)
            out[slot + static_cast<int>(ai) * levels.size()] =
                field_sum_sq(fields[ai]);
          const auto occ = occupation_by_cell(p, part);
          double s = 0.0;
          for (std::size_t c = 0; c < occ.size(); ++c)
            if (part.cells[c].square) s += sq(kPi * occ[c]);
          out[alphas.size() * levels.size() + slot] = s;
          ++slot;
        }
      },
      cfg.threads);

  // means are enough for the point estimate; bootstrap needs replicate-level
  // values, so the estimator is rerun on mean ratios for the CI-free check
  std::vector<double> dims;
  std::string note;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    std::vector<double> xs, ys;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      xs.push_back(levels[li] * std::log(2.0));
      ys.push_back(std::log(stats[li + ai * levels.size()].mean));
    }
    const double dim = -linear_fit(xs, ys).slope;
    dims.push_back(dim);
    note += fmt("a=%.1f D=%.2f ", alphas[ai], dim);
  }
  std::vector<double> xs, ys;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    xs.push_back(levels[li] * std::log(2.0));
    ys.push_back(std::log(stats[alphas.size() * levels.size() + li].mean));
  }
  const double dim0 = -linear_fit(xs, ys).slope;
  note += fmt("a=0 surrogate D=%.2f", dim0);

  bool ok = true;
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    ok = ok && std::abs(dims[ai] - (2.0 - alphas[ai])) <= 0.5;
    if (ai > 0) ok = ok && dims[ai] < dims[ai - 1];
  }
  r.analytic = 2.0 - alphas[0];
  r.estimate = dims[0];
  r.pass = ok;
  r.note = note;
  PlotSeries s;
  s.name = "dimension_vs_alpha";
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    s.xs.push_back(alphas[ai]);
    s.ys.push_back(dims[ai]);
  }
  s.annotation = "correlation dimension vs alpha";
  r.plots.push_back(s);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// registry
// ---------------------------------------------------------------------------

const std::vector<RegistryEntry>& test_registry() {
  static const std::vector<RegistryEntry> reg = [] {
    std::vector<RegistryEntry> v;
    auto add = [&](const char* id, const char* anchor,
                   std::function<TestResult(const ExperimentConfig&)> fn) {
      v.push_back({id, anchor, std::move(fn)});
    };
    add("kernels_disk_exact", "disk kernel closed forms", t_kernels_disk);
    add("kernels_xi_invariance", "xi conformal invariance", t_xi_invariance);
    add("rect_green_symmetry", "rectangle Green symmetry", t_rect_symmetry);
    add("rect_green_fd", "rectangle Green vs finite differences", t_rect_fd);

    const auto disk = NiceDomain::unit_disk();
    static const std::vector<HitCfg> hit_cfgs = {
        {"hitting_cfg1", disk, NiceDomain::disk(Point(0, 0), 0.5),
         Point(0.25, 0), Point(0, 0)},
        {"hitting_cfg2", disk, NiceDomain::disk(Point(0, 0), 0.7),
         Point(0, 0.35), Point(0, 0)},
        {"hitting_cfg3", disk, NiceDomain::disk(Point(0.2, 0), 0.5),
         Point(0.45, 0), Point(0.2, 0)},
        {"hitting_cfg4", NiceDomain::rect(0, 0, 1, 1),
         NiceDomain::disk(Point(0.5, 0.5), 0.25), Point(0.5, 0.625),
         Point(0.5, 0.5)},
        {"hitting_cfg5", NiceDomain::disk(Point(0, 0), 2.0),
         NiceDomain::disk(Point(0, 0), 1.0), Point(0, 0.6), Point(0, 0)},
    };
    for (const auto& hc : hit_cfgs)
      add(hc.id, "hit-order probability H_D1/H_D",
          [&hc](const ExperimentConfig& c) { return run_hitting(c, hc); });

    static const std::vector<WeightCfg> weight_cfgs = {
        {"excursion_weight_L1_disk", disk, NiceDomain::disk(Point(0, 0), 0.4),
         Point(0.8, 0), Point(-0.72, 0.15), Point(0, 0), 1},
        {"excursion_weight_L2_disk", disk, NiceDomain::disk(Point(0, 0), 0.4),
         Point(0.8, 0), Point(-0.72, 0.15), Point(0, 0), 2},
        {"excursion_weight_L1_rect", NiceDomain::rect(0, 0, 1, 1),
         NiceDomain::disk(Point(0.45, 0.55), 0.2), Point(0.12, 0.2),
         Point(0.85, 0.7), Point(0.45, 0.55), 1},
        {"excursion_weight_L2_rect", NiceDomain::rect(0, 0, 1, 1),
         NiceDomain::disk(Point(0.45, 0.55), 0.2), Point(0.12, 0.2),
         Point(0.85, 0.7), Point(0.45, 0.55), 2},
    };
    for (const auto& wc : weight_cfgs)
      add(wc.id, "excursion weight identity",
          [&wc](const ExperimentConfig& c) { return run_eq_weight(c, wc); });

    add("identity_single_crossing", "single-crossing expectation", t_eq310);
    add("identity_zx", "conditioned-path expectation identity", t_lemma_zx);
    add("identity_loops", "loop-measure expectation identity", t_lemma_loops);
    add("identity_zz", "root-loop expectation identity", t_lemma_zz);

    add("rn_normalization", "Radon-Nikodym normalization",
        [](const ExperimentConfig& c) {
          return run_rn(c, "rn_normalization",
                        [](const std::vector<ExcursionRecord>&) { return true; },
                        true);
        });
    add("rn_event_two_excursions", "Radon-Nikodym, event {>= 2 excursions}",
        [](const ExperimentConfig& c) {
          return run_rn(c, "rn_event_two_excursions",
                        [](const std::vector<ExcursionRecord>& recs) {
                          return recs.size() >= 2;
                        },
                        false);
        });
    add("rn_event_first_left", "Radon-Nikodym, event {first entry on the left}",
        [](const ExperimentConfig& c) {
          return run_rn(c, "rn_event_first_left",
                        [](const std::vector<ExcursionRecord>& recs) {
                          return !recs.empty() && recs.front().e_g.real() < 0;
                        },
                        false);
        });

    add("martingale_structure", "mass means constant across levels",
        t_martingale);
    add("positivity_sanity", "positivity of the field", t_positivity);
    add("weight_oracle", "series vs enumeration", t_weight_oracle);
    add("weight_bound", "series bound", t_weight_bound);

    add("loop_stats_a05", "ladder crossing statistics, a = 0.5",
        [](const ExperimentConfig& c) {
          return run_loop_stats(c, "loop_stats_a05", 0.5);
        });
    add("loop_stats_a15", "ladder crossing statistics, a = 1.5",
        [](const ExperimentConfig& c) {
          return run_loop_stats(c, "loop_stats_a15", 1.5);
        });

    add("besq_moments", "squared-Bessel moments", t_besq_moments);
    add("xprocess_b05", "radial reduction limit, beta = 0.5",
        [](const ExperimentConfig& c) {
          return run_xprocess(c, "xprocess_b05", 0.5);
        });
    add("xprocess_b10", "radial reduction limit, beta = 1",
        [](const ExperimentConfig& c) {
          return run_xprocess(c, "xprocess_b10", 1.0);
        });

    add("alpha0_occupation", "zero-tilt field is pi x occupation", t_alpha0);
    add("spine_fixed_mesh", "mean field mass vs analytic density", t_spine);
    add("conformal_pushforward", "conformal covariance of the mean density",
        t_pushforward);
    add("dimension_exploratory", "correlation-sum dimension", t_dimension);
    return v;
  }();
  return reg;
}

std::vector<TestResult> run_suite(const ExperimentConfig& cfg) {
  std::vector<TestResult> out;
  for (const auto& entry : test_registry()) {
    if (!cfg.tests.empty() &&
        std::find(cfg.tests.begin(), cfg.tests.end(), entry.id) ==
            cfg.tests.end())
      continue;
    const auto t0 = std::chrono::steady_clock::now();
    TestResult r = entry.fn(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    r.runtime_ms =
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count() /
        1000.0;
    out.push_back(std::move(r));
  }
  return out;
}

bool all_passed(const std::vector<TestResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

namespace {
json result_to_json(const TestResult& r) {
  json j;
  j["id"] = r.id;
  j["anchor"] = r.anchor;
  j["analytic"] = std::isfinite(r.analytic) ? json(r.analytic) : json();
  j["estimate"] = std::isfinite(r.estimate) ? json(r.estimate) : json();
  j["std_error"] = std::isfinite(r.std_error) ? json(r.std_error) : json();
  j["z_score"] = std::isfinite(r.z_score) ? json(r.z_score) : json();
  j["pass"] = r.pass;
  j["exploratory"] = r.exploratory;
  j["note"] = r.note;
  return j;
}
}  // namespace

std::string report_json(const ExperimentConfig& cfg,
                        const std::vector<TestResult>& results) {
  json j;
  j["config"] = json::parse(cfg.to_json());
  auto arr = json::array();
  for (const auto& r : results) arr.push_back(result_to_json(r));
  j["results"] = arr;
  j["all_pass"] = all_passed(results);
  j["multiple_testing_note"] =
      "pass rule is 3 sigma per test; across the whole registry an occasional "
      "marginal failure is expected by chance, rerun with a fresh seed before "
      "declaring a regression";
  return j.dump(2);
}

std::string report_csv(const std::vector<TestResult>& results) {
  std::string s =
      "id,anchor,analytic,estimate,std_error,z_score,pass,exploratory,"
      "runtime_ms,note\n";
  char line[1024];
  for (const auto& r : results) {
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    std::snprintf(line, sizeof(line),
                  "%s,\"%s\",%.17g,%.17g,%.17g,%.17g,%d,%d,%.3f,\"%s\"\n",
                  r.id.c_str(), r.anchor.c_str(), r.analytic, r.estimate,
                  r.std_error, r.z_score, r.pass ? 1 : 0,
                  r.exploratory ? 1 : 0, r.runtime_ms, note.c_str());
    s += line;
  }
  return s;
}

std::string plot_svg(const PlotSeries& s) {
  const int W = 640, H = 420, ML = 60, MB = 50, MT = 30, MR = 20;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    xmin = std::min(xmin, s.xs[i]);
    xmax = std::max(xmax, s.xs[i]);
    ymin = std::min(ymin, s.ys[i]);
    ymax = std::max(ymax, s.ys[i]);
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto py = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MB - MT);
  };
  std::string svg;
  char b[512];
  std::snprintf(b, sizeof(b),
                "<svg xmlns='http://www.w3.org/2000/svg' width='%d' "
                "height='%d'>\n<rect width='%d' height='%d' fill='white'/>\n",
                W, H, W, H);
  svg += b;
  std::snprintf(b, sizeof(b),
                "<line x1='%d' y1='%d' x2='%d' y2='%d' stroke='black'/>\n"
                "<line x1='%d' y1='%d' x2='%d' y2='%d' stroke='black'/>\n",
                ML, H - MB, W - MR, H - MB, ML, MT, ML, H - MB);
  svg += b;
  svg += "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    std::snprintf(b, sizeof(b), "%.2f,%.2f ", px(s.xs[i]), py(s.ys[i]));
    svg += b;
  }
  svg += "'/>\n";
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    std::snprintf(b, sizeof(b),
                  "<circle cx='%.2f' cy='%.2f' r='3' fill='steelblue'/>\n",
                  px(s.xs[i]), py(s.ys[i]));
    svg += b;
  }
  std::snprintf(b, sizeof(b),
                "<text x='%d' y='20' font-family='sans-serif' "
                "font-size='14'>%s</text>\n",
                ML, s.name.c_str());
  svg += b;
  std::snprintf(b, sizeof(b),
                "<text x='%d' y='%d' font-family='sans-serif' font-size='12' "
                "fill='dimgray'>%s</text>\n",
                ML, H - 12, s.annotation.c_str());
  svg += b;
  std::snprintf(
      b, sizeof(b),
      "<text x='12' y='%d' font-family='sans-serif' font-size='10' "
      "transform='rotate(-90 12 %d)'>[%.3g, %.3g]</text>\n",
      (MT + H - MB) / 2, (MT + H - MB) / 2, ymin, ymax);
  svg += b;
  svg += "</svg>\n";
  return svg;
}

void emit_report(const ExperimentConfig& cfg,
                 const std::vector<TestResult>& results,
                 const std::string& dir,
                 const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto want = [&](const char* f) {
    return formats.empty() ||
           std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  if (want("json")) {
    std::ofstream out(fs::path(dir) / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write report.json");
    out << report_json(cfg, results);
  }
  if (want("csv")) {
    std::ofstream out(fs::path(dir) / "report.csv", std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write report.csv");
    out << report_csv(results);
  }
  if (want("svg")) {
    for (const auto& r : results)
      for (const auto& p : r.plots) {
        std::ofstream out(fs::path(dir) / (p.name + ".svg"), std::ios::binary);
        if (!out) throw std::runtime_error("emit_report: cannot write svg");
        out << plot_svg(p);
      }
  }
}

}  // namespace thickpoints
