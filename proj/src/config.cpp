#include "mchain/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace mchain {

using nlohmann::json;

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::quantum_jump: return "quantum_jump";
    case Protocol::no_click: return "no_click";
    case Protocol::hermitian_quench: return "hermitian_quench";
    case Protocol::fixed_interval: return "fixed_interval";
    case Protocol::projective: return "projective";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  for (auto p : {Protocol::quantum_jump, Protocol::no_click, Protocol::hermitian_quench,
                 Protocol::fixed_interval, Protocol::projective})
    if (s == to_string(p)) return p;
  throw ConfigError("protocol: unknown value '" + s + "'");
}

double StatsOptions::tau_split_for(double gamma) const {
  if (tau_split) return *tau_split;
  return gamma > 0.0 ? 5.0 / gamma : std::numeric_limits<double>::infinity();
}

namespace {

long long checked_ratio(double num, double den, const char* field) {
  const double r = num / den;
  const long long n = std::llround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream os;
    os << field << ": " << num << " is not a positive integer multiple of dt = " << den;
    throw ConfigError(os.str());
  }
  return n;
}

template <class T>
T get_field(const json& doc, const std::string& path, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + key + ": wrong type (" + std::string(it->type_name()) + ")");
  }
}

}  // namespace

long long SimConfig::n_steps() const { return std::llround(t_max / dt); }
long long SimConfig::steps_per_sample() const { return checked_ratio(sample_interval, dt, "sample_interval"); }
long long SimConfig::steps_per_fixed_jump() const { return checked_ratio(delta_t, dt, "delta_t"); }

int SimConfig::primary_site() const {
  return lattice.monitored_sites.empty() ? 0 : lattice.monitored_sites.front();
}

void SimConfig::validate() const {
  lattice.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be > 0");
  if (!(sample_interval >= dt - 1e-15)) throw ConfigError("sample_interval: must be >= dt");
  steps_per_sample();
  if (!(t_max >= sample_interval)) throw ConfigError("t_max: must be >= sample_interval");
  checked_ratio(t_max, dt, "t_max");
  if (n_steps() % steps_per_sample() != 0)
    throw ConfigError("t_max: must be an integer multiple of sample_interval");
  if (subsystem_sizes.empty()) throw ConfigError("subsystem_sizes: must not be empty");
  for (int ell : subsystem_sizes)
    if (ell < 1 || ell >= lattice.L)
      throw ConfigError("subsystem_sizes: " + std::to_string(ell) + " outside [1, L)");
  if (subsystem_offset < 0 || subsystem_offset >= lattice.L)
    throw ConfigError("subsystem_offset: outside [0, L)");
  if (n_trajectories < 1) throw ConfigError("n_trajectories: must be >= 1");

  if (lattice.monitored_sites.empty())
    throw ConfigError("monitored_sites: at least one monitored site is required");
  const double guard = lattice.gamma * dt * static_cast<double>(lattice.monitored_sites.size());
  if (guard > 0.1 + 1e-12) {
    std::ostringstream os;
    os << "step guard: sum over monitored sites of gamma*dt = " << guard
       << " exceeds 0.1 (reduce dt or gamma)";
    throw ConfigError(os.str());
  }
  if (protocol == Protocol::fixed_interval) {
    if (!(delta_t > 0.0)) throw ConfigError("delta_t: fixed_interval needs delta_t > 0");
    steps_per_fixed_jump();
  }
  if (!(stats.kernel_width >= 0.0)) throw ConfigError("stats.kernel_width: must be >= 0");
  for (double e : stats.epsilons)
    if (!(e > 0.0)) throw ConfigError("stats.epsilons: entries must be > 0");
  if (stats.bins < 0) throw ConfigError("stats.bins: must be >= 0");
  if (stats.tau_bins < 1) throw ConfigError("stats.tau_bins: must be >= 1");
  if (!(stats.dE_cut_quantile > 0.0 && stats.dE_cut_quantile < 1.0))
    throw ConfigError("stats.dE_cut_quantile: must lie in (0, 1)");
  if (!(stats.tail_fraction > 0.0 && stats.tail_fraction <= 1.0))
    throw ConfigError("stats.tail_fraction: must lie in (0, 1]");
  if (stats.fit_window && !(stats.fit_window->first < stats.fit_window->second))
    throw ConfigError("stats.fit_window: need start < end");
}

json SimConfig::to_json() const {
  json j;
  j["L"] = lattice.L;
  j["J"] = lattice.J;
  j["pbc"] = lattice.pbc;
  j["nu"] = lattice.nu;
  j["gamma"] = lattice.gamma;
  j["monitored_sites"] = lattice.monitored_sites;
  j["protocol"] = to_string(protocol);
  j["dt"] = dt;
  j["t_max"] = t_max;
  j["sample_interval"] = sample_interval;
  j["subsystem_sizes"] = subsystem_sizes;
  j["subsystem_offset"] = subsystem_offset;
  j["n_trajectories"] = n_trajectories;
  j["seed"] = master_seed;
  if (protocol == Protocol::fixed_interval) j["delta_t"] = delta_t;
  json s;
  s["epsilons"] = stats.epsilons;
  s["kernel_width"] = stats.kernel_width;
  s["tau_split"] = stats.tau_split ? json(*stats.tau_split) : json(nullptr);
  s["bins"] = stats.bins;
  s["fit_window"] = stats.fit_window
                        ? json::array({stats.fit_window->first, stats.fit_window->second})
                        : json(nullptr);
  s["dE_cut_quantile"] = stats.dE_cut_quantile;
  s["tau_bins"] = stats.tau_bins;
  s["tail_fraction"] = stats.tail_fraction;
  j["stats"] = s;
  return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string SimConfig::fingerprint() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(to_json().dump());
  return os.str();
}

SimConfig config_from_json(const json& input, const json& overrides) {
  if (!input.is_object()) throw ConfigError("config: top level must be a JSON object");
  json doc = input;
  if (!overrides.is_null() && !overrides.empty()) doc.merge_patch(overrides);

  static const std::set<std::string> known = {
      "L", "J", "pbc", "nu", "gamma", "monitored_sites", "n_monitored", "protocol", "dt",
      "t_max", "sample_interval", "subsystem_sizes", "subsystem_offset", "n_trajectories",
      "seed", "delta_t", "stats", "output_dir"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw ConfigError(key + ": unknown field");

  SimConfig c;
  if (!doc.contains("L")) throw ConfigError("L: required field missing");
  c.lattice.L = get_field<int>(doc, "", "L", 0);
  c.lattice.J = get_field<double>(doc, "", "J", 0.5);
  c.lattice.pbc = get_field<bool>(doc, "", "pbc", true);
  c.lattice.nu = get_field<double>(doc, "", "nu", 0.25);
  c.lattice.gamma = get_field<double>(doc, "", "gamma", 0.0);
  if (doc.contains("monitored_sites") && doc.contains("n_monitored") &&
      !doc["n_monitored"].is_null() && !doc["monitored_sites"].is_null())
    throw ConfigError("n_monitored: conflicts with monitored_sites");
  if (auto n = get_field<int>(doc, "", "n_monitored", 0); n > 0) {
    if (n > c.lattice.L) throw ConfigError("n_monitored: exceeds L");
    c.lattice.monitored_sites = evenly_spaced_sites(c.lattice.L, n);
  } else {
    c.lattice.monitored_sites = get_field<std::vector<int>>(doc, "", "monitored_sites", {0});
  }
  c.protocol = protocol_from_string(get_field<std::string>(doc, "", "protocol", "quantum_jump"));
  c.dt = get_field<double>(doc, "", "dt", 0.05);
  if (!doc.contains("t_max")) throw ConfigError("t_max: required field missing");
  c.t_max = get_field<double>(doc, "", "t_max", 0.0);
  c.sample_interval = get_field<double>(doc, "", "sample_interval", 0.5);
  c.subsystem_sizes = get_field<std::vector<int>>(doc, "", "subsystem_sizes",
                                                  {std::max(1, c.lattice.L / 4)});
  c.subsystem_offset = get_field<int>(doc, "", "subsystem_offset", 0);
  c.n_trajectories = get_field<int>(doc, "", "n_trajectories", 200);
  c.master_seed = get_field<std::uint64_t>(doc, "", "seed", 1);
  c.delta_t = get_field<double>(doc, "", "delta_t", 0.0);
  c.output_dir = get_field<std::string>(doc, "", "output_dir", "runs");

  if (auto it = doc.find("stats"); it != doc.end() && !it->is_null()) {
    const json& s = *it;
    if (!s.is_object()) throw ConfigError("stats: must be an object");
    static const std::set<std::string> known_stats = {
        "epsilons", "kernel_width", "tau_split", "bins", "fit_window",
        "dE_cut_quantile", "tau_bins", "tail_fraction"};
    for (const auto& [key, _] : s.items())
      if (!known_stats.count(key)) throw ConfigError("stats." + key + ": unknown field");
    auto& o = c.stats;
    o.epsilons = get_field<std::vector<double>>(s, "stats.", "epsilons", o.epsilons);
    o.kernel_width = get_field<double>(s, "stats.", "kernel_width", o.kernel_width);
    if (s.contains("tau_split") && !s["tau_split"].is_null())
      o.tau_split = get_field<double>(s, "stats.", "tau_split", 0.0);
    o.bins = get_field<int>(s, "stats.", "bins", o.bins);
    if (s.contains("fit_window") && !s["fit_window"].is_null()) {
      auto w = get_field<std::vector<double>>(s, "stats.", "fit_window", {});
      if (w.size() != 2) throw ConfigError("stats.fit_window: expected [start, end]");
      o.fit_window = std::make_pair(w[0], w[1]);
    }
    o.dE_cut_quantile = get_field<double>(s, "stats.", "dE_cut_quantile", o.dE_cut_quantile);
    o.tau_bins = get_field<int>(s, "stats.", "tau_bins", o.tau_bins);
    o.tail_fraction = get_field<double>(s, "stats.", "tail_fraction", o.tail_fraction);
  }
  c.validate();
  return c;
}

SimConfig parse_config(const std::filesystem::path& file, const json& overrides) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + file.string() + ": " + e.what());
  }
  return config_from_json(doc, overrides);
}

}  // namespace mchain
