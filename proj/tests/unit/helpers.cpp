#include "helpers.hpp"

#include <fstream>
#include <sstream>

namespace testing {

mchain::SimConfig small_config(const nlohmann::json& patch) {
  nlohmann::json base = {{"L", 16},         {"J", 0.5},   {"nu", 0.25},
                         {"gamma", 0.5},    {"t_max", 20}, {"subsystem_sizes", {4}},
                         {"n_trajectories", 4}};
  return mchain::config_from_json(base, patch);
}

mchain::GaussianState random_state(int L, int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  mchain::CMatrix A(L, N);
  for (int i = 0; i < L; ++i)
    for (int k = 0; k < N; ++k) A(i, k) = {g(rng), g(rng)};
  mchain::GaussianState s(A);
  mchain::reorthonormalize(s);
  return s;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("mchain_test_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace testing
