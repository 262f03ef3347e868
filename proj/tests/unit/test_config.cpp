#include <doctest.h>

#include <fstream>
#include <set>

#include "helpers.hpp"
#include "mchain/config.hpp"

using namespace mchain;
using nlohmann::json;

namespace {

std::string error_of(const json& doc, const json& overrides = {}) {
  try {
    config_from_json(doc, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const json kMinimal = json::parse(
    R"({"L": 128, "J": 0.5, "gamma": 0.5, "nu": 0.25, "protocol": "quantum_jump", "t_max": 100})");

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const auto c = config_from_json(kMinimal);
  CHECK(c.lattice.L == 128);
  CHECK(c.lattice.J == 0.5);
  CHECK(c.lattice.pbc);
  CHECK(c.lattice.monitored_sites == std::vector<int>{0});
  CHECK(c.protocol == Protocol::quantum_jump);
  CHECK(c.dt == 0.05);
  CHECK(c.sample_interval == 0.5);
  CHECK(c.subsystem_offset == 0);
  CHECK(c.subsystem_sizes == std::vector<int>{32});
  CHECK(c.n_trajectories == 200);
  CHECK(c.master_seed == 1u);
  CHECK(c.stats.epsilons == std::vector<double>{0.05});
  CHECK(c.stats.tau_split_for(0.5) == doctest::Approx(10.0));
  CHECK(c.n_steps() == 2000);
  CHECK(c.steps_per_sample() == 10);
  CHECK(c.sample_count() == 201);
}

TEST_CASE("step guard rejects sum gamma dt > 0.1 and reports the value") {
  // dt * gamma * N_sites = 0.05 * 0.5 * 8 = 0.2
  const auto msg = error_of(kMinimal, {{"n_monitored", 8}});
  CHECK(msg.find("0.2") != std::string::npos);
  CHECK(msg.find("step guard") != std::string::npos);
  CHECK(error_of(kMinimal, {{"gamma", 4.0}}).find("0.2") != std::string::npos);
  CHECK(error_of(kMinimal, {{"n_monitored", 8}, {"dt", 0.025}}).empty());
  // The guard is not tied to the jump protocol.
  CHECK_FALSE(error_of(kMinimal, {{"gamma", 4.0}, {"protocol", "no_click"}}).empty());
}

TEST_CASE("overrides patch file values") {
  const auto c = config_from_json(kMinimal, {{"gamma", 0.3}, {"stats", {{"bins", 40}}}});
  CHECK(c.lattice.gamma == 0.3);
  CHECK(c.stats.bins == 40);
  CHECK(c.stats.kernel_width == 5.0);

  const auto dir = testing::scratch_dir("config");
  std::ofstream(dir / "c.json") << kMinimal.dump();
  CHECK(parse_config(dir / "c.json", {{"gamma", 0.3}}).lattice.gamma == 0.3);
  CHECK_THROWS_AS(parse_config(dir / "missing.json"), ConfigError);
  std::ofstream(dir / "bad.json") << "{\"L\": 12,";
  CHECK_THROWS_AS(parse_config(dir / "bad.json"), ConfigError);
}

TEST_CASE("schema errors name the field") {
  CHECK(error_of({{"t_max", 10}}).rfind("L:", 0) == 0);
  CHECK(error_of({{"L", 16}}).rfind("t_max:", 0) == 0);
  CHECK(error_of(kMinimal, {{"gama", 0.1}}).rfind("gama:", 0) == 0);
  CHECK(error_of(kMinimal, {{"L", "big"}}).rfind("L: wrong type", 0) == 0);
  CHECK(error_of(kMinimal, {{"stats", {{"bogus", 1}}}}) == "stats.bogus: unknown field");
  CHECK(error_of(kMinimal, {{"stats", {{"bins", "x"}}}}).rfind("stats.bins:", 0) == 0);
  CHECK(error_of(kMinimal, {{"stats", {{"fit_window", {5, 1}}}}}).rfind("stats.fit_window:", 0) == 0);
  CHECK(error_of(kMinimal, {{"protocol", "weak"}}).rfind("protocol:", 0) == 0);
  CHECK(error_of(kMinimal, {{"subsystem_sizes", {128}}}).rfind("subsystem_sizes:", 0) == 0);
  CHECK(error_of(kMinimal, {{"sample_interval", 0.07}}).rfind("sample_interval:", 0) == 0);
  CHECK(error_of(kMinimal, {{"sample_interval", 0.01}}).rfind("sample_interval:", 0) == 0);
  CHECK(error_of(kMinimal, {{"t_max", 0.2}}).rfind("t_max:", 0) == 0);
  CHECK(error_of(kMinimal, {{"protocol", "fixed_interval"}}).rfind("delta_t:", 0) == 0);
  CHECK(error_of(kMinimal, {{"n_monitored", 2}, {"monitored_sites", {0}}}).rfind("n_monitored:", 0) == 0);
  CHECK(error_of(kMinimal, {{"monitored_sites", json::array()}}).rfind("monitored_sites:", 0) == 0);
  CHECK(error_of({}).size() > 0);
}

TEST_CASE("n_monitored spaces sites evenly") {
  const auto c = config_from_json(kMinimal, {{"L", 32}, {"n_monitored", 4}, {"dt", 0.025}});
  CHECK(c.lattice.monitored_sites == std::vector<int>{0, 8, 16, 24});
  CHECK(c.primary_site() == 0);
}

TEST_CASE("fingerprint is stable under key order and separates distinct configs") {
  const json reordered = json::parse(
      R"({"t_max": 100, "protocol": "quantum_jump", "nu": 0.25, "gamma": 0.5, "J": 0.5, "L": 128})");
  CHECK(config_from_json(kMinimal).fingerprint() == config_from_json(reordered).fingerprint());
  CHECK(config_from_json(kMinimal).fingerprint().size() == 16u);
  // Output location is not part of the identity.
  CHECK(config_from_json(kMinimal, {{"output_dir", "elsewhere"}}).fingerprint() ==
        config_from_json(kMinimal).fingerprint());

  std::set<std::string> seen;
  std::vector<json> variants{{},
                             {{"gamma", 0.3}},
                             {{"L", 64}},
                             {{"seed", 2}},
                             {{"dt", 0.025}},
                             {{"subsystem_sizes", {8, 16}}},
                             {{"subsystem_offset", 3}},
                             {{"protocol", "no_click"}},
                             {{"protocol", "projective"}},
                             {{"protocol", "fixed_interval"}, {"delta_t", 1.0}},
                             {{"protocol", "fixed_interval"}, {"delta_t", 2.0}},
                             {{"n_monitored", 2}},
                             {{"n_trajectories", 100}},
                             {{"stats", {{"bins", 30}}}},
                             {{"nu", 0.5}},
                             {{"pbc", false}, {"protocol", "no_click"}}};
  for (const auto& v : variants) seen.insert(config_from_json(kMinimal, v).fingerprint());
  CHECK(seen.size() == variants.size());
}

TEST_CASE("canonical JSON round-trips") {
  const auto c = config_from_json(kMinimal, {{"stats", {{"fit_window", {10, 50}}, {"tau_split", 7.0}}},
                                             {"subsystem_sizes", {4, 8}}});
  const auto back = config_from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.fingerprint() == c.fingerprint());
  REQUIRE(back.stats.fit_window);
  CHECK(back.stats.fit_window->second == 50.0);
  CHECK(*back.stats.tau_split == 7.0);
}
