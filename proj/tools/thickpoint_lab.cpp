// thickpoint-lab: sampling, measure fields and the identity-test suite for
// planar Brownian thick-point statistics.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thickpoints/harness.hpp"

using namespace thickpoints;
namespace fs = std::filesystem;

namespace {

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return ExperimentConfig::from_json(text);
}

void dump_path_binary(const PathSample& p, std::ofstream& out) {
  // little-endian f64 triplets t, x, y
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double trip[3] = {p.times[i], p.pos[i].real(), p.pos[i].imag()};
    out.write(reinterpret_cast<const char*>(trip), sizeof(trip));
  }
}

ConditioningSpec exit_spec_for(const ExperimentConfig& cfg) {
  ConditioningSpec spec;
  spec.target = cfg.zp;
  if (cfg.domain.classify(cfg.zp) == PointClass::Boundary) {
    spec.mode = ConditioningSpec::Mode::ExitAtBoundaryPoint;
  } else {
    spec.mode = ConditioningSpec::Mode::HitPoint;
    spec.gate_radius = 0.25 * std::min(std::abs(cfg.zp - cfg.x),
                                       cfg.domain.boundary_distance(cfg.zp));
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thickpoint-lab: thick-point measures of planar Brownian motion"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", dump_file;
  std::uint64_t seed_opt = 0;
  long replicates_opt = -1;
  int threads_opt = -1;
  std::vector<std::string> formats;
  double scale_opt = 0.0;

  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--seed", seed_opt, "RNG seed (overrides config)");
  app.add_option("--replicates", replicates_opt,
                 "replicate count (overrides per-test sizes)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", formats, "report formats: json csv svg");
  app.add_option("--threads", threads_opt, "worker threads (0 = hardware)");
  app.add_option("--scale", scale_opt,
                 "scale factor on pinned per-test replicate counts");

  auto* cmd_kernels = app.add_subcommand("kernels", "print kernel values");
  auto* cmd_path = app.add_subcommand("sample-path", "sample paths");
  std::string path_mode = "killed";
  long n_paths = 1;
  cmd_path->add_option("--mode", path_mode, "killed | hit-x | to-zp");
  cmd_path->add_option("--paths", n_paths, "number of paths");
  cmd_path->add_option("--dump", dump_file, "binary path dump (t,x,y f64)");
  auto* cmd_q = app.add_subcommand("sample-q", "sample tilted-law bundles");
  long n_bundles = 10;
  cmd_q->add_option("--bundles", n_bundles, "number of bundles");
  cmd_q->add_option("--dump", dump_file, "binary path dump of bundle paths");
  auto* cmd_measure = app.add_subcommand("measure", "build a measure field");
  auto* cmd_verify = app.add_subcommand("verify", "run the identity suite");
  auto* cmd_thick = app.add_subcommand("thick", "ladder crossing statistics");
  long thick_bundles = 200;
  int thick_kmax = 10;
  double thick_gamma = 0.0;
  cmd_thick->add_option("--bundles", thick_bundles, "bundles to average");
  cmd_thick->add_option("--kmax", thick_kmax, "deepest ladder index");
  cmd_thick->add_option("--gamma", thick_gamma,
                        "good-event threshold (0 = 2 alpha)");
  auto* cmd_lt = app.add_subcommand("localtime", "radial reduction statistics");
  double lt_beta = 1.0, lt_t = 50.0;
  long lt_runs = 1000;
  cmd_lt->add_option("--beta", lt_beta, "arrival intensity");
  cmd_lt->add_option("--t", lt_t, "time horizon");
  cmd_lt->add_option("--runs", lt_runs, "independent runs");
  auto* cmd_dim = app.add_subcommand("dimension", "correlation dimension");
  long dim_reps = 100;
  int dim_lmin = 3, dim_lmax = 6;
  cmd_dim->add_option("--replicates", dim_reps, "field realizations");
  cmd_dim->add_option("--level-min", dim_lmin, "coarsest level");
  cmd_dim->add_option("--level-max", dim_lmax, "finest level");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed_opt != 0) cfg.seed = seed_opt;
    if (replicates_opt >= 0) cfg.replicates = replicates_opt;
    if (threads_opt >= 0) cfg.threads = threads_opt;
    if (scale_opt > 0) cfg.replicate_scale = scale_opt;
    fs::create_directories(out_dir);

    if (cmd_kernels->parsed()) {
      cfg.validate();
      nlohmann::json j;
      j["G"] = green(cfg.domain, cfg.x, cfg.z);
      j["H"] = kernel_H(cfg.domain, cfg.x, cfg.z);
      j["xi"] = xi(cfg.domain, cfg.x, cfg.z, cfg.zp);
      j["C"] = capacity(cfg.domain, cfg.x);
      j["C_gap_rmin"] = capacity_gap(
          cfg.domain, NiceDomain::disk(cfg.x, cfg.r_min), cfg.x);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (cmd_path->parsed()) {
      cfg.validate();
      std::ofstream dump;
      if (!dump_file.empty()) dump.open(dump_file, std::ios::binary);
      for (long i = 0; i < n_paths; ++i) {
        Rng rng = Rng::substream(cfg.seed, hash64("sample-path"), i);
        PathSample p;
        if (path_mode == "killed") {
          p = sample_killed_bm(cfg.domain, cfg.z, cfg.step, rng);
        } else if (path_mode == "hit-x") {
          ConditioningSpec spec;
          spec.mode = ConditioningSpec::Mode::HitPoint;
          spec.target = cfg.x;
          p = sample_conditioned(cfg.domain, cfg.z, spec, cfg.step, rng);
        } else {
          p = sample_conditioned(cfg.domain, cfg.z, exit_spec_for(cfg),
                                 cfg.step, rng);
        }
        nlohmann::json j;
        j["replicate"] = i;
        j["steps"] = p.size();
        j["duration"] = p.duration();
        j["terminal"] =
            p.terminal == TerminalEvent::HitTarget ? "hit-target" : "exited";
        j["end"] = {p.end().real(), p.end().imag()};
        std::cout << j.dump() << "\n";
        if (dump.is_open()) dump_path_binary(p, dump);
      }
      return 0;
    }

    if (cmd_q->parsed()) {
      cfg.validate();
      std::vector<double> radii;
      for (int k = 8; k >= 1; --k) {
        const double r = cfg.r_min * std::pow(2.0, 8 - k);
        if (r < cfg.domain.boundary_distance(cfg.x)) radii.push_back(r);
      }
      std::sort(radii.begin(), radii.end());
      std::ofstream dump;
      if (!dump_file.empty()) dump.open(dump_file, std::ios::binary);
      for (long i = 0; i < n_bundles; ++i) {
        Rng rng = Rng::substream(cfg.seed, hash64("sample-q"), i);
        const QPathBundle b = sample_q(cfg.domain, cfg.z, cfg.zp, cfg.x,
                                       cfg.alpha, cfg.r_min, cfg.step, rng,
                                       radii);
        nlohmann::json j;
        j["replicate"] = i;
        j["loops"] = b.loops.size();
        j["lambda_alpha"] = b.lambda_alpha();
        j["t_x"] = b.t_x();
        j["crossings"] = b.loop_crossing_counts();
        std::cout << j.dump() << "\n";
        if (dump.is_open()) dump_path_binary(b.concatenated(), dump);
      }
      return 0;
    }

    if (cmd_measure->parsed()) {
      cfg.validate();
      Rng rng = Rng::substream(cfg.seed, hash64("measure"), 0);
      const double h =
          std::min(cfg.step, sq(std::ldexp(1.0, -cfg.mesh_max)) / 100.0);
      const PathSample p =
          sample_conditioned(cfg.domain, cfg.z, exit_spec_for(cfg), h, rng);
      const auto part = grid_partition(cfg.domain, cfg.mesh_max);
      const auto f = build_field(p, part, cfg.alpha);
      std::ofstream csv(fs::path(out_dir) / "field.csv", std::ios::binary);
      csv << field_to_csv(f);
      std::ofstream js(fs::path(out_dir) / "field.json", std::ios::binary);
      js << field_to_json(f);
      std::cout << "total interior mass " << f.total_mass() << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      const auto results = run_suite(cfg);
      emit_report(cfg, results, out_dir, formats);
      for (const auto& r : results)
        std::printf("[%s] %-28s est %.6g vs %.6g (se %.3g) %s\n",
                    r.pass ? "PASS" : "FAIL", r.id.c_str(), r.estimate,
                    r.analytic, r.std_error, r.note.c_str());
      return all_passed(results) ? 0 : 1;
    }

    if (cmd_thick->parsed()) {
      cfg.validate();
      std::vector<double> radii;
      for (int k = thick_kmax; k >= 1; --k) radii.push_back(std::exp(-double(k)));
      const double r_min = radii.front();
      const double gamma = thick_gamma > 0 ? thick_gamma : 2.0 * cfg.alpha + 1.0;
      std::vector<Welford> ncount(radii.size()), ups(radii.size());
      long good = 0;
      for (long i = 0; i < thick_bundles; ++i) {
        Rng rng = Rng::substream(cfg.seed, hash64("thick"), i);
        const QPathBundle b = sample_q(cfg.domain, cfg.z, cfg.zp, cfg.x,
                                       cfg.alpha, r_min, cfg.step, rng, radii);
        const auto counts = b.loop_crossing_counts();
        const auto us = bundle_upsilon(b);
        for (std::size_t k = 0; k < radii.size(); ++k) {
          ncount[k].add(static_cast<double>(counts[k]));
          ups[k].add(us[k]);
        }
        const auto rep = good_event(b, cfg.z, cfg.zp, std::exp(-1.0), gamma);
        if (rep.all_ok) ++good;
      }
      std::ofstream csv(fs::path(out_dir) / "thick.csv", std::ios::binary);
      csv << "k,r,N_mean,N_se,Upsilon_mean,Upsilon_se\n";
      for (std::size_t i = 0; i < radii.size(); ++i) {
        const double k = -std::log(radii[i]);
        char line[256];
        std::snprintf(line, sizeof(line), "%.0f,%.10g,%.10g,%.3g,%.10g,%.3g\n",
                      k, radii[i], ncount[i].mean, ncount[i].std_error(),
                      ups[i].mean, ups[i].std_error());
        csv << line;
      }
      std::cout << "good-event frequency "
                << static_cast<double>(good) / thick_bundles << " at gamma "
                << gamma << "\n";
      return 0;
    }

    if (cmd_lt->parsed()) {
      std::vector<double> grid;
      for (int i = 1; i <= 200; ++i) grid.push_back(lt_t * i / 200.0);
      std::vector<Welford> acc(grid.size());
      for (long i = 0; i < lt_runs; ++i) {
        Rng rng = Rng::substream(cfg.seed, hash64("localtime"), i);
        const XProcess xp = x_process(lt_beta, grid, rng);
        for (std::size_t k = 0; k < grid.size(); ++k)
          acc[k].add(xp.values[k] / (grid[k] * grid[k]));
      }
      std::ofstream csv(fs::path(out_dir) / "localtime.csv", std::ios::binary);
      csv << "t,ratio_mean,ratio_se,target\n";
      for (std::size_t k = 0; k < grid.size(); ++k) {
        char line[256];
        std::snprintf(line, sizeof(line), "%.6g,%.10g,%.3g,%.10g\n", grid[k],
                      acc[k].mean, acc[k].std_error(), 2.0 * lt_beta);
        csv << line;
      }
      std::cout << "X_t/t^2 at t=" << lt_t << ": " << acc.back().mean
                << " (target " << 2.0 * lt_beta << ")\n";
      return 0;
    }

    if (cmd_dim->parsed()) {
      cfg.validate();
      std::vector<int> levels;
      for (int l = dim_lmin; l <= dim_lmax; ++l) levels.push_back(l);
      const double h =
          std::min(cfg.step, sq(std::ldexp(1.0, -dim_lmax)) / 100.0);
      std::vector<std::vector<double>> per_level(levels.size());
      for (long i = 0; i < dim_reps; ++i) {
        Rng rng = Rng::substream(cfg.seed, hash64("dimension"), i);
        const PathSample p =
            sample_conditioned(cfg.domain, cfg.z, exit_spec_for(cfg), h, rng);
        for (std::size_t li = 0; li < levels.size(); ++li) {
          const auto part = grid_partition(cfg.domain, levels[li]);
          const auto f = build_field(p, part, cfg.alpha);
          per_level[li].push_back(field_sum_sq(f));
        }
      }
      Rng brng = Rng::substream(cfg.seed, hash64("dimension-bootstrap"), 0);
      const auto est = correlation_dimension(levels, per_level, brng);
      nlohmann::json j;
      j["alpha"] = cfg.alpha;
      j["dimension"] = est.dimension;
      j["ci"] = {est.ci_lo, est.ci_hi};
      j["log_mean_sum_sq"] = est.log_mean_sum_sq;
      std::ofstream js(fs::path(out_dir) / "dimension.json", std::ios::binary);
      js << j.dump(2);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
