#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mchain/config.hpp"
#include "mchain/ensemble.hpp"

namespace mchain {

const char* code_version();

struct RunManifest {
  std::string fingerprint;
  std::string code_version;
  std::string timestamp;  // UTC, ISO 8601
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> files;
  std::vector<std::pair<int, std::string>> failures;  // (trajectory index, message)
  bool complete = true;
};

nlohmann::ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

struct RunOptions {
  int workers = 0;       // 0 = OpenMP default
  bool persist = true;   // write runs/<fingerprint>/...
  bool serial = false;   // use the serial reference path
};

struct RunResult {
  std::filesystem::path dir;
  RunManifest manifest;
  EnsembleResult ensemble;
  nlohmann::ordered_json summary;
};

// Deterministic protocols (no_click, hermitian_quench, fixed_interval) run a
// single trajectory regardless of n_trajectories.
bool is_stochastic(Protocol p);

RunResult run_ensemble(const SimConfig& config, const RunOptions& options = {});

// Every reduction that applies to the records; failures of single reductions
// are reported inline as {"error": ...}.
nlohmann::ordered_json summarize(const SimConfig& config, std::span<const TrajectoryRecord> records,
                                 const EnsembleSummary& summary);

struct LoadedRun {
  SimConfig config;
  RunManifest manifest;
  std::vector<TrajectoryRecord> records;
};
// Throws ConfigError listing missing files.
LoadedRun load_run(const std::filesystem::path& dir);

// Reload the records of a run, re-reduce with `stats` (or the stored knobs)
// and rewrite summary.json.
nlohmann::ordered_json restat(const std::filesystem::path& dir,
                              const std::optional<StatsOptions>& stats = std::nullopt);

enum class SweepAxis { gamma, ell, deltaT, L, n_monitored };
const char* to_string(SweepAxis a);
SweepAxis sweep_axis_from_string(const std::string& s);

struct SweepPoint {
  double value = 0.0;
  std::string fingerprint;
  std::string error;  // non-empty when the point failed
  nlohmann::ordered_json reduction;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::gamma;
  std::filesystem::path dir;
  std::vector<SweepPoint> points;
  // Named series over the axis values (failed points omitted).
  std::vector<std::pair<std::string, ScalarSeries>> series;
  std::optional<LinearFit> fit;  // ell sweep only

  nlohmann::ordered_json to_json() const;
  const ScalarSeries* find(const std::string& name) const;
};

// Runs every point, then applies the reduction matching the axis:
// gamma -> waiting_time_stats, ell -> steady_scaling, deltaT -> growth_velocity,
// L -> saturation_time, n_monitored -> waiting-time and jump-change statistics.
SweepResult sweep(const SimConfig& base, SweepAxis axis, const std::vector<double>& values,
                  const RunOptions& options = {});

// Figures (SVG plus CSV) for a run directory or a sweep directory, written to
// <dir>/figures.  Returns the files written.
std::vector<std::filesystem::path> report(const std::filesystem::path& dir);

}  // namespace mchain
