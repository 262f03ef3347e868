#include "mchain/ensemble.hpp"

#include <exception>

#include <omp.h>

namespace mchain {

bool EnsembleResult::complete() const { return failed() == 0; }

std::size_t EnsembleResult::failed() const {
  std::size_t n = 0;
  for (const auto& f : failures) n += f.empty() ? 0 : 1;
  return n;
}

std::vector<TrajectoryRecord> EnsembleResult::successful() const {
  std::vector<TrajectoryRecord> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (failures[i].empty()) out.push_back(records[i]);
  return out;
}

namespace {

EnsembleResult prepare(const TrajectoryContext& ctx, int n) {
  if (n < 1) throw ConfigError("ensemble: n_trajectories must be >= 1");
  EnsembleResult res;
  res.records.resize(n);
  res.failures.resize(n);
  res.seeds.resize(n);
  for (int i = 0; i < n; ++i) res.seeds[i] = trajectory_seed(ctx.config.master_seed, i);
  return res;
}

void run_one(const TrajectoryContext& ctx, EnsembleResult& res, int i) {
  try {
    res.records[i] = run_trajectory(ctx, res.seeds[i]);
  } catch (const std::exception& e) {
    res.failures[i] = e.what();
    res.records[i] = TrajectoryRecord{};
  }
}

// Ordered reduce over trajectory index, independent of completion order.
void reduce(EnsembleResult& res) {
  for (std::size_t i = 0; i < res.records.size(); ++i)
    if (res.failures[i].empty()) res.summary.add(res.records[i]);
}

}  // namespace

EnsembleResult run_ensemble_serial(const TrajectoryContext& ctx, int n) {
  EnsembleResult res = prepare(ctx, n);
  for (int i = 0; i < n; ++i) run_one(ctx, res, i);
  reduce(res);
  return res;
}

EnsembleResult run_ensemble_parallel(const TrajectoryContext& ctx, int n, int workers) {
  EnsembleResult res = prepare(ctx, n);
  const int threads = workers > 0 ? workers : default_workers();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < n; ++i) run_one(ctx, res, i);
  reduce(res);
  return res;
}

int default_workers() { return omp_get_max_threads(); }

}  // namespace mchain
