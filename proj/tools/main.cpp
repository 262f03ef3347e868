// mchain: monitored free-fermion chain simulator.
//
//   mchain run      --config cfg.json [--gamma 0.3 ...]
//   mchain sweep    --config cfg.json --axis gamma --values 0.1,0.5,2
//   mchain stats    runs/<fingerprint> [--epsilon 0.05 ...]
//   mchain report   runs/<fingerprint> [more dirs]
//   mchain validate
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-integrity error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mchain/config.hpp"
#include "mchain/experiment.hpp"
#include "mchain/log.hpp"
#include "mchain/types.hpp"
#include "mchain/validation.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Flags that patch fields of the config file.
struct Overrides {
  std::optional<int> L;
  std::optional<double> J, nu, gamma, dt, t_max, sample_interval, delta_t;
  std::optional<std::string> protocol;
  std::vector<int> ells, monitored;
  std::optional<int> n_monitored, offset, trajectories;
  std::optional<std::uint64_t> seed;
  std::optional<bool> pbc;

  void attach(CLI::App* app) {
    app->add_option("--L", L, "chain length");
    app->add_option("--J", J, "hopping amplitude");
    app->add_option("--nu", nu, "filling fraction");
    app->add_option("--gamma", gamma, "monitoring rate");
    app->add_option("--pbc", pbc, "periodic boundary (true/false)");
    app->add_option("--monitored", monitored, "monitored sites")->delimiter(',');
    app->add_option("--n-monitored", n_monitored, "number of evenly spaced monitored sites");
    app->add_option("--protocol", protocol,
                    "quantum_jump | no_click | hermitian_quench | fixed_interval | projective");
    app->add_option("--dt", dt, "time step");
    app->add_option("--t-max", t_max, "final time");
    app->add_option("--sample-interval", sample_interval, "sampling interval");
    app->add_option("--ell", ells, "subsystem sizes")->delimiter(',');
    app->add_option("--offset", offset, "first site of the subsystem");
    app->add_option("--trajectories", trajectories, "number of trajectories");
    app->add_option("--delta-t", delta_t, "jump interval (fixed_interval)");
    app->add_option("--seed", seed, "master seed");
  }

  json patch() const {
    json p = json::object();
    if (L) p["L"] = *L;
    if (J) p["J"] = *J;
    if (nu) p["nu"] = *nu;
    if (gamma) p["gamma"] = *gamma;
    if (pbc) p["pbc"] = *pbc;
    if (!monitored.empty()) {
      p["monitored_sites"] = monitored;
      p["n_monitored"] = nullptr;
    }
    if (n_monitored) {
      p["n_monitored"] = *n_monitored;
      p["monitored_sites"] = nullptr;
    }
    if (protocol) p["protocol"] = *protocol;
    if (dt) p["dt"] = *dt;
    if (t_max) p["t_max"] = *t_max;
    if (sample_interval) p["sample_interval"] = *sample_interval;
    if (!ells.empty()) p["subsystem_sizes"] = ells;
    if (offset) p["subsystem_offset"] = *offset;
    if (trajectories) p["n_trajectories"] = *trajectories;
    if (delta_t) p["delta_t"] = *delta_t;
    if (seed) p["seed"] = *seed;
    return p;
  }
};

struct StatsFlags {
  std::vector<double> epsilons;
  std::optional<double> kernel_width, tau_split, tail_fraction, dE_cut_quantile;
  std::optional<int> bins, tau_bins;
  std::vector<double> fit_window;

  void attach(CLI::App* app) {
    app->add_option("--epsilon", epsilons, "saturation tolerances")->delimiter(',');
    app->add_option("--kernel-width", kernel_width, "Gaussian smoothing width (time units)");
    app->add_option("--tau-split", tau_split, "dark-interval threshold");
    app->add_option("--bins", bins, "histogram bins (0 = Freedman-Diaconis)");
    app->add_option("--tau-bins", tau_bins, "bins of the waiting-time conditioning");
    app->add_option("--tail-fraction", tail_fraction, "tail fraction for S_inf");
    app->add_option("--dE-quantile", dE_cut_quantile, "energy-cut quantile");
    app->add_option("--fit-window", fit_window, "velocity fit window t0,t1")->delimiter(',')->expected(2);
  }

  bool any() const {
    return !epsilons.empty() || kernel_width || tau_split || tail_fraction || dE_cut_quantile || bins ||
           tau_bins || !fit_window.empty();
  }

  json patch() const {
    json s = json::object();
    if (!epsilons.empty()) s["epsilons"] = epsilons;
    if (kernel_width) s["kernel_width"] = *kernel_width;
    if (tau_split) s["tau_split"] = *tau_split;
    if (bins) s["bins"] = *bins;
    if (tau_bins) s["tau_bins"] = *tau_bins;
    if (tail_fraction) s["tail_fraction"] = *tail_fraction;
    if (dE_cut_quantile) s["dE_cut_quantile"] = *dE_cut_quantile;
    if (!fit_window.empty()) s["fit_window"] = fit_window;
    return s.empty() ? json() : json{{"stats", s}};
  }
};

mchain::SimConfig load_config(const std::string& file, const Overrides& o, const StatsFlags& sf,
                              const std::string& out) {
  json patch = o.patch();
  if (sf.any()) patch.merge_patch(sf.patch());
  if (!out.empty()) patch["output_dir"] = out;
  if (file.empty()) return mchain::config_from_json(json::object(), patch);
  return mchain::parse_config(file, patch);
}

void print_run(const mchain::RunResult& r) {
  const auto& s = r.summary;
  std::cout << "run " << r.manifest.fingerprint << "  trajectories=" << s["trajectories"]
            << (r.manifest.complete ? "" : "  INCOMPLETE") << '\n';
  if (!r.dir.empty()) std::cout << "  dir " << r.dir.string() << '\n';
  if (s.contains("entropy"))
    for (const auto& e : s["entropy"])
      std::cout << "  ell=" << e["ell"] << "  S(0)=" << e["s0"] << "  S(t_max)=" << e["s_final"]
                << "  S_inf=" << e["s_inf"] << '\n';
  if (s.contains("jumps") && s["jumps"]["waiting_time"].contains("ratio")) {
    const auto& w = s["jumps"]["waiting_time"];
    std::cout << "  jumps=" << s["jumps"]["events"] << "  mu=" << w["mu"] << "  sigma/mu=" << w["ratio"]
              << " +- " << w["ratio_stderr"] << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monitored free-fermion chain: quantum-jump trajectories and their statistics"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "progress messages");
  app.add_flag("-q,--quiet", quiet, "errors only");

  std::string config_file, out_dir;
  int workers = 0;
  bool serial = false, with_report = false;
  Overrides ov;
  StatsFlags sf;

  auto* run = app.add_subcommand("run", "run one ensemble and persist it");
  run->add_option("-c,--config", config_file, "JSON config file");
  run->add_option("-w,--workers", workers, "worker threads (0 = all)");
  run->add_option("-o,--out", out_dir, "output root (default runs)");
  run->add_flag("--serial", serial, "use the serial reference path");
  run->add_flag("--report", with_report, "also write figures");
  ov.attach(run);
  sf.attach(run);

  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "run an ensemble per axis value and reduce");
  sweep->add_option("-c,--config", config_file, "JSON config file");
  sweep->add_option("--axis", axis, "gamma | ell | deltaT | L | n_monitored")->required();
  sweep->add_option("--values", values, "axis values")->delimiter(',')->required();
  sweep->add_option("-w,--workers", workers, "worker threads (0 = all)");
  sweep->add_option("-o,--out", out_dir, "output root (default runs)");
  sweep->add_flag("--report", with_report, "also write figures");
  Overrides sweep_ov;
  StatsFlags sweep_sf;
  sweep_ov.attach(sweep);
  sweep_sf.attach(sweep);

  std::string run_dir;
  StatsFlags stats_sf;
  auto* stats = app.add_subcommand("stats", "re-reduce the persisted records of a run");
  stats->add_option("dir", run_dir, "run directory")->required();
  stats_sf.attach(stats);

  std::vector<std::string> report_dirs;
  auto* report = app.add_subcommand("report", "write SVG figures and CSVs for runs or sweeps");
  report->add_option("dirs", report_dirs, "run or sweep directories")->required();

  auto* validate = app.add_subcommand("validate", "run the oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  mchain::log::set_level(quiet ? mchain::log::Level::quiet
                               : verbose ? mchain::log::Level::info : mchain::log::Level::warn);

  try {
    mchain::RunOptions opts;
    opts.workers = workers;
    opts.serial = serial;

    if (*run) {
      const auto cfg = load_config(config_file, ov, sf, out_dir);
      const auto r = mchain::run_ensemble(cfg, opts);
      print_run(r);
      if (with_report) mchain::report(r.dir);
      return r.manifest.complete ? 0 : kExitNumerical;
    }
    if (*sweep) {
      const auto cfg = load_config(config_file, sweep_ov, sweep_sf, out_dir);
      const auto r = mchain::sweep(cfg, mchain::sweep_axis_from_string(axis), values, opts);
      std::cout << "sweep " << axis << "  dir " << r.dir.string() << '\n';
      for (const auto& p : r.points)
        std::cout << "  " << axis << '=' << p.value << "  "
                  << (p.error.empty() ? p.fingerprint : "FAILED: " + p.error) << '\n';
      for (const auto& [name, s] : r.series) {
        std::cout << "  " << name << ':';
        for (std::size_t i = 0; i < s.x.size(); ++i) std::cout << "  (" << s.x[i] << ", " << s.y[i] << ')';
        std::cout << '\n';
      }
      if (r.fit)
        std::cout << "  linear fit slope=" << r.fit->slope << " +- " << r.fit->slope_err
                  << "  adj_r2=" << r.fit->adj_r2 << '\n';
      if (with_report) mchain::report(r.dir);
      bool failed = false;
      for (const auto& p : r.points) failed |= !p.error.empty();
      return failed ? kExitNumerical : 0;
    }
    if (*stats) {
      std::optional<mchain::StatsOptions> so;
      if (stats_sf.any()) {
        const auto loaded = mchain::load_run(run_dir);
        json doc = loaded.manifest.config;
        doc.merge_patch(stats_sf.patch());
        so = mchain::config_from_json(doc).stats;
      }
      const auto s = mchain::restat(run_dir, so);
      std::cout << s.dump(1) << '\n';
      return 0;
    }
    if (*report) {
      for (const auto& d : report_dirs)
        for (const auto& f : mchain::report(d)) std::cout << f.string() << '\n';
      return 0;
    }
    if (*validate) {
      bool ok = true;
      for (const auto& c : mchain::run_oracle_suite()) {
        std::printf("%s  %-36s error=%.3e tol=%.0e %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                    c.error, c.tolerance, c.detail.c_str());
        ok &= c.passed;
      }
      return ok ? 0 : kExitNumerical;
    }
  } catch (const mchain::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mchain::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
