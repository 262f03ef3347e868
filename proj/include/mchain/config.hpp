#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mchain/lattice.hpp"

namespace mchain {

enum class Protocol { quantum_jump, no_click, hermitian_quench, fixed_interval, projective };

const char* to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

// Knobs for the reductions in statistics.hpp.
struct StatsOptions {
  std::vector<double> epsilons{0.05};
  double kernel_width = 5.0;           // time units (Gaussian sigma)
  std::optional<double> tau_split;     // defaults to 5 / gamma
  int bins = 0;                        // 0 = Freedman-Diaconis
  std::optional<std::pair<double, double>> fit_window;
  double dE_cut_quantile = 0.9;
  int tau_bins = 20;
  double tail_fraction = 0.2;

  double tau_split_for(double gamma) const;
};

struct SimConfig {
  LatticeSpec lattice;
  Protocol protocol = Protocol::quantum_jump;
  double dt = 0.05;
  double t_max = 0.0;
  double sample_interval = 0.5;
  std::vector<int> subsystem_sizes;
  int subsystem_offset = 0;
  int n_trajectories = 200;
  std::uint64_t master_seed = 1;
  double delta_t = 0.0;  // fixed_interval only
  StatsOptions stats;
  std::filesystem::path output_dir = "runs";

  // Derived grid quantities; valid after validate().
  long long n_steps() const;
  long long steps_per_sample() const;
  long long steps_per_fixed_jump() const;
  int sample_count() const { return static_cast<int>(n_steps() / steps_per_sample()) + 1; }

  // Site whose occupation is recorded and which is hit by single-site protocols.
  int primary_site() const;
  // Subsystem size whose entropy feeds the jump event log.
  int event_ell() const { return subsystem_sizes.front(); }

  // Throws ConfigError naming the offending field.
  void validate() const;

  // Canonical JSON of every semantic field (output_dir excluded).
  nlohmann::json to_json() const;

  // Content hash of to_json(), 16 hex digits.
  std::string fingerprint() const;
};

// Parse a config document; `overrides` is merge-patched on top first.
SimConfig config_from_json(const nlohmann::json& doc, const nlohmann::json& overrides = {});
SimConfig parse_config(const std::filesystem::path& file, const nlohmann::json& overrides = {});

// FNV-1a, 64 bit.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace mchain
