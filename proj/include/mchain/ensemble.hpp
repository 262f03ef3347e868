#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mchain/statistics.hpp"
#include "mchain/trajectory.hpp"

namespace mchain {

struct EnsembleResult {
  std::vector<TrajectoryRecord> records;  // index order; failed slots stay empty
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> failures;      // empty string = success
  EnsembleSummary summary;                // over successful records, index order

  bool complete() const;
  std::size_t failed() const;
  std::vector<TrajectoryRecord> successful() const;
};

// Reference implementation: one trajectory after the other.
EnsembleResult run_ensemble_serial(const TrajectoryContext& ctx, int n_trajectories);

// Trajectories distributed over an OpenMP team of `workers` threads
// (0 = runtime default).  Output is identical to the serial version.
EnsembleResult run_ensemble_parallel(const TrajectoryContext& ctx, int n_trajectories, int workers);

int default_workers();

}  // namespace mchain
