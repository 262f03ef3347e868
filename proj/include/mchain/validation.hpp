#pragma once

#include <string>
#include <vector>

namespace mchain {

struct CheckResult {
  std::string name;
  bool passed = false;
  double error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

// Quick self-checks against the exact Fock-space simulation and closed forms.
// Runs in a few seconds.
std::vector<CheckResult> run_oracle_suite();

// Max deviation between a quantum-jump trajectory on a short chain and the
// exact many-body replay of the same jump record (every step sampled).
struct ReplayDeviation {
  double occupation = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  std::size_t events = 0;
  std::size_t samples = 0;
};
ReplayDeviation fock_replay_deviation(int L, double nu, double gamma, double dt, int steps,
                                      unsigned long long seed);

}  // namespace mchain
