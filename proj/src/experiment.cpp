#include "mchain/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "mchain/log.hpp"
#include "mchain/record_io.hpp"
#include "mchain/svg_plot.hpp"

#ifndef MCHAIN_VERSION
#define MCHAIN_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace mchain {

const char* code_version() { return MCHAIN_VERSION; }

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string traj_stem(std::size_t i) {
  std::ostringstream os;
  os << "traj_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing input: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ordered_json read_ordered_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing input: " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

template <class Fn>
ordered_json guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return ordered_json{{"error", e.what()}};
  }
}

ordered_json velocity_json(const Velocity& v) {
  return {{"v", v.v}, {"err", v.err}, {"t_start", v.t_start}, {"t_end", v.t_end}, {"points", v.points}};
}

ordered_json waiting_json(const WaitingTimeStats& w) {
  ordered_json j;
  j["mu"] = w.mu;
  j["sigma"] = w.sigma;
  j["ratio"] = w.ratio;
  j["ratio_stderr"] = w.ratio_stderr;
  j["tau_split"] = w.tau_split;
  j["dark_mean"] = w.dark_mean;
  j["dark_count"] = w.dark_count;
  j["histogram"] = to_json(w.histogram);
  return j;
}

std::size_t event_count(std::span<const TrajectoryRecord> records) {
  std::size_t n = 0;
  for (const auto& r : records)
    for (const auto& e : r.events)
      if (!e.skipped) ++n;
  return n;
}

}  // namespace

bool is_stochastic(Protocol p) { return p == Protocol::quantum_jump || p == Protocol::projective; }

ordered_json to_json(const RunManifest& m) {
  ordered_json j;
  j["fingerprint"] = m.fingerprint;
  j["code_version"] = m.code_version;
  j["timestamp"] = m.timestamp;
  j["complete"] = m.complete;
  j["config"] = m.config;
  j["seeds"] = m.seeds;
  j["files"] = m.files;
  ordered_json f = ordered_json::array();
  for (const auto& [i, msg] : m.failures) f.push_back({{"index", i}, {"error", msg}});
  j["failures"] = f;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.code_version = j.value("code_version", "");
    m.timestamp = j.value("timestamp", "");
    m.complete = j.value("complete", false);
    m.config = j.at("config");
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.files = j.value("files", std::vector<std::string>{});
    for (const auto& f : j.value("failures", json::array()))
      m.failures.emplace_back(f.at("index").get<int>(), f.at("error").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

ordered_json summarize(const SimConfig& config, std::span<const TrajectoryRecord> records,
                       const EnsembleSummary& summary) {
  const StatsOptions& so = config.stats;
  ordered_json j;
  j["fingerprint"] = config.fingerprint();
  j["protocol"] = to_string(config.protocol);
  j["trajectories"] = summary.count;
  j["ensemble"] = to_json(summary);
  if (summary.count == 0) return j;

  ordered_json ent = ordered_json::array();
  for (std::size_t i = 0; i < summary.ells.size(); ++i) {
    const auto mean = summary.entropy_mean(i);
    ordered_json e;
    e["ell"] = summary.ells[i];
    e["s0"] = mean.front();
    e["s_final"] = mean.back();
    e["s_inf"] = tail_mean(mean, so.tail_fraction);
    ordered_json sat = ordered_json::array();
    for (double eps : so.epsilons) {
      const auto r = saturation_time(summary.times, mean, eps, so.kernel_width, so.tail_fraction);
      sat.push_back({{"epsilon", eps}, {"tau_inf", r.tau_inf ? json(*r.tau_inf) : json(nullptr)}});
    }
    e["saturation"] = sat;
    e["velocity"] = guarded([&] {
      return velocity_json(
          growth_velocity(summary.times, mean, so.fit_window, so.kernel_width, so.tail_fraction));
    });
    ent.push_back(e);
  }
  j["entropy"] = ent;

  if (summary.ells.size() >= 2) {
    j["scaling"] = guarded([&] {
      std::vector<double> s_inf;
      for (std::size_t i = 0; i < summary.ells.size(); ++i)
        s_inf.push_back(tail_mean(summary.entropy_mean(i), so.tail_fraction));
      const auto f = steady_scaling(summary.ells, s_inf);
      ordered_json s;
      s["points"] = to_json(f.points);
      s["linear"] = to_json(f.linear);
      s["logarithmic"] = to_json(f.logarithmic);
      s["linear_preferred"] = f.linear_preferred;
      return s;
    });
  }

  if (event_count(records) == 0) return j;
  ordered_json jumps;
  jumps["events"] = event_count(records);
  const double tau_split = so.tau_split_for(config.lattice.gamma);
  jumps["waiting_time"] =
      guarded([&] { return waiting_json(waiting_time_stats(records, so.bins, tau_split)); });
  jumps["changes"] = guarded([&] {
    const auto h = jump_change_histograms(records, so.bins);
    return ordered_json{{"dS_qj", to_json(h.dS_qj)}, {"dS_nH_rate", to_json(h.dS_nH_rate)}};
  });
  jumps["conditioned_on_tau"] = guarded([&] {
    const auto taus = pooled_waiting_times(records);
    if (taus.empty()) throw ConfigError("no jump events");
    const double hi = *std::max_element(taus.begin(), taus.end());
    std::vector<double> edges;
    for (int b = 0; b <= so.tau_bins; ++b) edges.push_back(hi * (1.0 + 1e-9) * b / so.tau_bins);
    return to_json(conditioned_jump_stats(records, edges));
  });
  jumps["energy_conditioned"] = guarded([&] {
    const auto p = energy_entropy_pairs(records);
    if (p.dE.empty()) throw ConfigError("no jump followed by an interval");
    const double cut = quantile(p.dE, so.dE_cut_quantile);
    const auto c = energy_conditioned_entropy(records, cut, so.bins);
    return ordered_json{{"quantile", so.dE_cut_quantile},
                        {"cut", c.cut},
                        {"above", to_json(c.above)},
                        {"below", to_json(c.below)}};
  });
  jumps["energy_entropy_correlation"] = guarded([&] {
    const auto c = energy_entropy_correlation(records);
    return ordered_json{{"pearson", c.defined ? json(c.pearson) : json(nullptr)},
                        {"defined", c.defined},
                        {"binned", to_json(c.binned)}};
  });
  jumps["tau_vs_dE"] = guarded([&] {
    const auto p = energy_entropy_pairs(records);
    return to_json(binned_means(p.dE, p.tau, quantile_edges(p.dE, 10)));
  });
  j["jumps"] = jumps;
  return j;
}

RunResult run_ensemble(const SimConfig& input, const RunOptions& options) {
  SimConfig config = input;
  config.validate();
  if (!is_stochastic(config.protocol) && config.n_trajectories > 1) {
    log::info(std::string(to_string(config.protocol)) + " is deterministic; running one trajectory");
    config.n_trajectories = 1;
  }
  const auto ctx = TrajectoryContext::build(config);

  RunResult out;
  out.ensemble = options.serial ? run_ensemble_serial(ctx, config.n_trajectories)
                                : run_ensemble_parallel(ctx, config.n_trajectories, options.workers);
  auto& ens = out.ensemble;
  const auto ok = ens.successful();
  out.summary = summarize(config, ok, ens.summary);

  RunManifest& m = out.manifest;
  m.fingerprint = ctx.fingerprint;
  m.code_version = code_version();
  m.timestamp = utc_timestamp();
  m.config = config.to_json();
  m.seeds = ens.seeds;
  m.complete = ens.complete();
  for (std::size_t i = 0; i < ens.failures.size(); ++i)
    if (!ens.failures[i].empty()) m.failures.emplace_back(static_cast<int>(i), ens.failures[i]);

  if (!options.persist) return out;
  out.dir = config.output_dir / ctx.fingerprint;
  fs::create_directories(out.dir);
  for (std::size_t i = 0; i < ens.records.size(); ++i) {
    if (!ens.failures[i].empty()) continue;
    const std::string stem = traj_stem(i);
    write_record(ens.records[i], out.dir / (stem + ".csv"), out.dir / (stem + ".events.jsonl"));
    m.files.push_back(stem + ".csv");
    m.files.push_back(stem + ".events.jsonl");
  }
  write_text(out.dir / "summary.json", out.summary.dump(1) + "\n");
  m.files.push_back("summary.json");
  write_text(out.dir / "manifest.json", to_json(m).dump(1) + "\n");
  if (!m.complete)
    log::warn("run " + m.fingerprint + ": " + std::to_string(m.failures.size()) +
              " trajectories failed; manifest marked incomplete");
  return out;
}

LoadedRun load_run(const fs::path& dir) {
  LoadedRun run;
  run.manifest = manifest_from_json(read_json(dir / "manifest.json"));
  run.config = config_from_json(run.manifest.config);
  run.config.output_dir = dir.parent_path();

  std::vector<std::string> missing;
  for (const auto& f : run.manifest.files)
    if (!fs::exists(dir / f)) missing.push_back(f);
  if (!missing.empty()) {
    std::string msg = "missing inputs in " + dir.string() + ":";
    for (const auto& f : missing) msg += " " + f;
    throw ConfigError(msg);
  }

  std::vector<bool> failed(run.manifest.seeds.size(), false);
  for (const auto& [i, _] : run.manifest.failures)
    if (i >= 0 && static_cast<std::size_t>(i) < failed.size()) failed[i] = true;
  for (std::size_t i = 0; i < run.manifest.seeds.size(); ++i) {
    if (failed[i]) continue;
    const std::string stem = traj_stem(i);
    auto r = read_record(dir / (stem + ".csv"), dir / (stem + ".events.jsonl"));
    r.fingerprint = run.manifest.fingerprint;
    r.protocol = run.config.protocol;
    r.seed = run.manifest.seeds[i];
    r.check_invariants(run.config.sample_interval);
    run.records.push_back(std::move(r));
  }
  return run;
}

ordered_json restat(const fs::path& dir, const std::optional<StatsOptions>& stats) {
  auto run = load_run(dir);
  if (stats) run.config.stats = *stats;
  const auto summary = ensemble_average(run.records);
  auto j = summarize(run.config, run.records, summary);
  // The run keeps its identity even if the reduction knobs changed.
  j["fingerprint"] = run.manifest.fingerprint;
  write_text(dir / "summary.json", j.dump(1) + "\n");
  return j;
}

const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::ell: return "ell";
    case SweepAxis::deltaT: return "deltaT";
    case SweepAxis::L: return "L";
    case SweepAxis::n_monitored: return "n_monitored";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  for (auto a : {SweepAxis::gamma, SweepAxis::ell, SweepAxis::deltaT, SweepAxis::L, SweepAxis::n_monitored})
    if (s == to_string(a)) return a;
  throw ConfigError("axis: unknown sweep axis '" + s + "' (gamma, ell, deltaT, L, n_monitored)");
}

const ScalarSeries* SweepResult::find(const std::string& name) const {
  for (const auto& [n, s] : series)
    if (n == name) return &s;
  return nullptr;
}

ordered_json SweepResult::to_json() const {
  ordered_json j;
  j["axis"] = mchain::to_string(axis);
  ordered_json pts = ordered_json::array();
  for (const auto& p : points) {
    ordered_json q;
    q["value"] = p.value;
    q["fingerprint"] = p.fingerprint;
    if (!p.error.empty()) q["error"] = p.error;
    q["reduction"] = p.reduction;
    pts.push_back(q);
  }
  j["points"] = pts;
  ordered_json s = ordered_json::object();
  for (const auto& [name, series_] : series) s[name] = mchain::to_json(series_);
  j["series"] = s;
  if (fit) j["fit"] = mchain::to_json(*fit);
  return j;
}

namespace {

struct SeriesBuilder {
  std::vector<std::pair<std::string, ScalarSeries>>& out;
  void add(const std::string& name, double x, double y, double err = std::nan("")) {
    if (!std::isfinite(y)) return;
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == name; });
    if (it == out.end()) {
      out.emplace_back(name, ScalarSeries{});
      it = std::prev(out.end());
    }
    it->second.x.push_back(x);
    it->second.y.push_back(y);
    if (std::isfinite(err)) it->second.err.push_back(err);
  }
};

double num_or_nan(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number()) return std::nan("");
  return j[key].get<double>();
}

SimConfig point_config(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig c = base;
  const int iv = static_cast<int>(std::lround(value));
  switch (axis) {
    case SweepAxis::gamma:
      c.lattice.gamma = value;
      break;
    case SweepAxis::deltaT:
      c.protocol = Protocol::fixed_interval;
      c.delta_t = value;
      break;
    case SweepAxis::L:
      c.lattice.L = iv;
      c.subsystem_sizes = {std::max(1, iv / 4)};
      if (c.lattice.monitored_sites.size() > 1)
        c.lattice.monitored_sites =
            evenly_spaced_sites(iv, static_cast<int>(c.lattice.monitored_sites.size()));
      break;
    case SweepAxis::n_monitored:
      if (iv < 1 || iv > c.lattice.L) throw ConfigError("n_monitored: must be in [1, L]");
      c.lattice.monitored_sites = evenly_spaced_sites(c.lattice.L, iv);
      break;
    case SweepAxis::ell:
      break;
  }
  return c;
}

}  // namespace

SweepResult sweep(const SimConfig& base, SweepAxis axis, const std::vector<double>& values,
                  const RunOptions& options) {
  if (values.empty()) throw ConfigError("values: sweep needs at least one value");
  SweepResult res;
  res.axis = axis;
  SeriesBuilder sb{res.series};

  std::string key = base.fingerprint() + ":" + to_string(axis);
  for (double v : values) key += ":" + format_double(v);
  std::ostringstream name;
  name << "sweep_" << to_string(axis) << '_' << std::hex << std::setw(16) << std::setfill('0')
       << fnv1a64(key);
  res.dir = base.output_dir / name.str();

  if (axis == SweepAxis::ell) {
    // One ensemble carries every subsystem size.
    SimConfig c = base;
    c.subsystem_sizes.clear();
    for (double v : values) c.subsystem_sizes.push_back(static_cast<int>(std::lround(v)));
    try {
      const auto run = run_ensemble(c, options);
      const auto& ent = run.summary.at("entropy");
      std::vector<double> s_inf;
      for (std::size_t i = 0; i < values.size(); ++i) {
        SweepPoint p{values[i], run.manifest.fingerprint, "", ent[i]};
        s_inf.push_back(ent[i]["s_inf"].get<double>());
        sb.add("s_inf", values[i], s_inf.back());
        res.points.push_back(std::move(p));
      }
      if (values.size() >= 2) {
        try {
          const auto f = steady_scaling(c.subsystem_sizes, s_inf);
          res.fit = f.linear;
          sb.add("linear_adj_r2", 0.0, f.linear.adj_r2);
          sb.add("log_adj_r2", 0.0, f.logarithmic.adj_r2);
        } catch (const std::exception& e) {
          log::warn(std::string("ell sweep fit: ") + e.what());
        }
      }
    } catch (const std::exception& e) {
      for (double v : values) res.points.push_back({v, "", e.what(), ordered_json::object()});
    }
  } else {
    for (double v : values) {
      SweepPoint p;
      p.value = v;
      try {
        const SimConfig c = point_config(base, axis, v);
        const auto run = run_ensemble(c, options);
        p.fingerprint = run.manifest.fingerprint;
        const auto& s = run.summary;
        const auto& e0 = s.at("entropy").at(0);
        ordered_json red;
        red["s_inf"] = e0["s_inf"];
        red["s_final"] = e0["s_final"];
        red["velocity"] = e0["velocity"];
        red["saturation"] = e0["saturation"];
        if (s.contains("jumps")) {
          red["waiting_time"] = s["jumps"]["waiting_time"];
          red["changes"] = s["jumps"]["changes"];
        }
        if (!run.manifest.complete) p.error = "incomplete ensemble";
        p.reduction = red;

        sb.add("s_inf", v, num_or_nan(e0, "s_inf"));
        sb.add("velocity", v, num_or_nan(e0["velocity"], "v"), num_or_nan(e0["velocity"], "err"));
        for (const auto& sat : e0["saturation"])
          if (sat["tau_inf"].is_number())
            sb.add("tau_inf_eps" + format_double(sat["epsilon"].get<double>()), v,
                   sat["tau_inf"].get<double>());
        if (red.contains("waiting_time")) {
          const auto& w = red["waiting_time"];
          sb.add("wtd_ratio", v, num_or_nan(w, "ratio"), num_or_nan(w, "ratio_stderr"));
          sb.add("wtd_mu", v, num_or_nan(w, "mu"));
          sb.add("dark_mean", v, num_or_nan(w, "dark_mean"));
        }
        if (red.contains("changes") && red["changes"].contains("dS_qj")) {
          sb.add("dS_qj_mean", v, num_or_nan(red["changes"]["dS_qj"], "mean"),
                 num_or_nan(red["changes"]["dS_qj"], "stderr_mean"));
          sb.add("dS_qj_m3", v, num_or_nan(red["changes"]["dS_qj"], "m3"));
          sb.add("dS_nH_rate_m3", v, num_or_nan(red["changes"]["dS_nH_rate"], "m3"));
        }
      } catch (const std::exception& e) {
        p.error = e.what();
        log::warn("sweep " + std::string(to_string(axis)) + "=" + format_double(v) + ": " + e.what());
      }
      res.points.push_back(std::move(p));
    }
  }

  if (options.persist) {
    fs::create_directories(res.dir);
    write_text(res.dir / "sweep.json", res.to_json().dump(1) + "\n");
    for (const auto& [n, s] : res.series) {
      std::ofstream out(res.dir / (n + ".csv"), std::ios::binary);
      write_series_csv(s, out);
    }
  }
  return res;
}

namespace {

std::vector<double> vec(const ordered_json& j) {
  std::vector<double> v;
  for (const auto& x : j) v.push_back(x.is_number() ? x.get<double>() : std::nan(""));
  return v;
}

svg::Series histogram_series(const ordered_json& h, const std::string& label) {
  svg::Series s;
  s.label = label;
  s.style = svg::Style::bars;
  s.x = vec(h.at("edges"));
  s.y = vec(h.at("density"));
  return s;
}

void write_histogram_figure(const fs::path& dir, const std::string& stem, const std::string& title,
                            const std::string& xlabel, std::vector<std::pair<std::string, ordered_json>> hists,
                            bool log_y, std::vector<fs::path>& written) {
  svg::Plot plot;
  plot.title = title;
  plot.xlabel = xlabel;
  plot.ylabel = "probability density";
  plot.log_y = log_y;
  std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
  csv << "series,left,right,count,density\n";
  for (const auto& [label, h] : hists) {
    if (!h.contains("edges")) continue;
    plot.series.push_back(histogram_series(h, label));
    const auto e = vec(h["edges"]);
    const auto d = vec(h["density"]);
    const auto& c = h["counts"];
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
      csv << label << ',' << format_double(e[i]) << ',' << format_double(e[i + 1]) << ','
          << c[i].get<long long>() << ',' << format_double(d[i]) << '\n';
  }
  svg::write(plot, (dir / (stem + ".svg")).string());
  written.push_back(dir / (stem + ".svg"));
  written.push_back(dir / (stem + ".csv"));
}

void write_series_figure(const fs::path& dir, const std::string& stem, const std::string& title,
                         const std::string& xlabel, const std::string& ylabel, const ScalarSeries& s,
                         svg::Style style, const std::optional<LinearFit>& fit,
                         std::vector<fs::path>& written) {
  svg::Plot plot;
  plot.title = title;
  plot.xlabel = xlabel;
  plot.ylabel = ylabel;
  plot.series.push_back({ylabel, s.x, s.y, s.err, style, ""});
  if (fit && !s.x.empty()) {
    const auto [lo, hi] = std::minmax_element(s.x.begin(), s.x.end());
    plot.series.push_back({"linear fit", {*lo, *hi},
                           {fit->intercept + fit->slope * *lo, fit->intercept + fit->slope * *hi},
                           {}, svg::Style::line, "#444444"});
  }
  svg::write(plot, (dir / (stem + ".svg")).string());
  std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
  write_series_csv(s, csv);
  written.push_back(dir / (stem + ".svg"));
  written.push_back(dir / (stem + ".csv"));
}

ScalarSeries series_from_json(const ordered_json& j) {
  ScalarSeries s;
  s.x = vec(j.at("x"));
  s.y = vec(j.at("y"));
  if (j.contains("err")) s.err = vec(j["err"]);
  if (j.contains("n")) s.n = j["n"].get<std::vector<long long>>();
  return s;
}

std::vector<fs::path> report_run(const fs::path& dir, const ordered_json& summary) {
  const fs::path fig = dir / "figures";
  fs::create_directories(fig);
  std::vector<fs::path> written;
  const auto& ens = summary.at("ensemble");
  const auto times = vec(ens.at("times"));

  {
    svg::Plot plot;
    plot.title = "mean entanglement entropy";
    plot.xlabel = "t";
    plot.ylabel = "S(t)";
    std::ofstream csv(fig / "entropy.csv", std::ios::binary);
    csv << "t";
    std::vector<std::vector<double>> cols;
    for (const auto& [ell, e] : ens.at("entropy").items()) {
      const auto mean = vec(e.at("mean"));
      const auto err = vec(e.at("stderr"));
      plot.series.push_back({"ell=" + ell, times, mean, err, svg::Style::line, ""});
      csv << ",S_ell" << ell << ",err_ell" << ell;
      cols.push_back(mean);
      cols.push_back(err);
    }
    csv << '\n';
    for (std::size_t i = 0; i < times.size(); ++i) {
      csv << format_double(times[i]);
      for (const auto& c : cols) csv << ',' << format_double(c[i]);
      csv << '\n';
    }
    svg::write(plot, (fig / "entropy.svg").string());
    written.push_back(fig / "entropy.svg");
    written.push_back(fig / "entropy.csv");
  }
  {
    ScalarSeries s{times, vec(ens.at("energy").at("mean")), vec(ens.at("energy").at("stderr")), {}};
    write_series_figure(fig, "energy", "mean energy", "t", "E(t)", s, svg::Style::line, std::nullopt,
                        written);
  }
  if (summary.contains("scaling") && summary["scaling"].contains("points")) {
    const auto& sc = summary["scaling"];
    LinearFit f;
    f.slope = sc["linear"]["slope"].get<double>();
    f.intercept = sc["linear"]["intercept"].get<double>();
    write_series_figure(fig, "scaling", "steady-state entropy vs subsystem size", "ell", "S_inf",
                        series_from_json(sc["points"]), svg::Style::scatter, f, written);
  }
  if (summary.contains("jumps")) {
    const auto& jm = summary["jumps"];
    if (jm["waiting_time"].contains("histogram"))
      write_histogram_figure(fig, "waiting_time", "waiting time distribution", "tau",
                             {{"P(tau)", jm["waiting_time"]["histogram"]}}, true, written);
    if (jm["changes"].contains("dS_qj")) {
      write_histogram_figure(fig, "dS_jump", "entropy change at jumps", "dS_qj",
                             {{"dS_qj", jm["changes"]["dS_qj"]}}, true, written);
      write_histogram_figure(fig, "dS_noclick_rate", "entropy change rate between jumps",
                             "dS_nH / tau", {{"dS_nH/tau", jm["changes"]["dS_nH_rate"]}}, true, written);
    }
    if (jm["energy_conditioned"].contains("cut"))
      write_histogram_figure(fig, "dS_energy_conditioned", "entropy change conditioned on energy change",
                             "dS_qj + dS_nH",
                             {{"dE > cut", jm["energy_conditioned"]["above"]},
                              {"dE <= cut", jm["energy_conditioned"]["below"]}},
                             false, written);
    if (jm["tau_vs_dE"].contains("x"))
      write_series_figure(fig, "tau_vs_dE", "waiting time vs energy change", "dE_qj", "mean tau",
                          series_from_json(jm["tau_vs_dE"]), svg::Style::scatter, std::nullopt, written);
    if (jm["energy_entropy_correlation"].contains("binned"))
      write_series_figure(fig, "dS_vs_dE", "entropy change vs energy change", "dE_qj", "mean dS",
                          series_from_json(jm["energy_entropy_correlation"]["binned"]),
                          svg::Style::scatter, std::nullopt, written);
  }
  return written;
}

std::vector<fs::path> report_sweep(const fs::path& dir, const ordered_json& sw) {
  const fs::path fig = dir / "figures";
  fs::create_directories(fig);
  std::vector<fs::path> written;
  const std::string axis = sw.at("axis").get<std::string>();
  std::optional<LinearFit> fit;
  if (sw.contains("fit")) {
    fit = LinearFit{};
    fit->slope = sw["fit"]["slope"].get<double>();
    fit->intercept = sw["fit"]["intercept"].get<double>();
  }
  for (const auto& [name, s] : sw.at("series").items()) {
    if (name.find("adj_r2") != std::string::npos) continue;
    write_series_figure(fig, name, name + " vs " + axis, axis, name, series_from_json(s),
                        svg::Style::scatter, name == "s_inf" ? fit : std::nullopt, written);
  }
  return written;
}

}  // namespace

std::vector<fs::path> report(const fs::path& dir) {
  if (fs::exists(dir / "sweep.json")) return report_sweep(dir, read_ordered_json(dir / "sweep.json"));
  if (fs::exists(dir / "summary.json")) return report_run(dir, read_ordered_json(dir / "summary.json"));
  throw ConfigError("missing inputs: neither " + (dir / "summary.json").string() + " nor " +
                    (dir / "sweep.json").string() + " exists");
}

}  // namespace mchain
