#include <doctest.h>

#include "helpers.hpp"
#include "mchain/ensemble.hpp"

using namespace mchain;
using testing::small_config;

namespace {

bool same(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.seed != b.seed || a.times != b.times || a.entropy != b.entropy || a.energy != b.energy ||
      a.occupation != b.occupation || a.events.size() != b.events.size())
    return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto &x = a.events[i], &y = b.events[i];
    if (x.time != y.time || x.site != y.site || x.tau != y.tau || x.dS_qj != y.dS_qj ||
        x.dS_nH != y.dS_nH || x.dE_qj != y.dE_qj || x.outcome != y.outcome)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parallel ensemble reproduces the serial reference bit for bit") {
  const auto ctx = TrajectoryContext::build(small_config({{"n_trajectories", 12}, {"seed", 77}}));
  const auto ref = run_ensemble_serial(ctx, 12);
  REQUIRE(ref.complete());
  for (int workers : {1, 3, 8}) {
    const auto par = run_ensemble_parallel(ctx, 12, workers);
    REQUIRE(par.complete());
    CHECK(par.seeds == ref.seeds);
    for (int i = 0; i < 12; ++i) CHECK(same(par.records[i], ref.records[i]));
    CHECK(par.summary.entropy[0].mean == ref.summary.entropy[0].mean);
    CHECK(par.summary.entropy[0].m2 == ref.summary.entropy[0].m2);
    CHECK(par.summary.energy.mean == ref.summary.energy.mean);
  }
}

TEST_CASE("seeds are a function of master seed and index") {
  const auto ctx = TrajectoryContext::build(small_config({{"seed", 5}}));
  const auto r = run_ensemble_serial(ctx, 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(r.seeds[i] == trajectory_seed(5, i));
    CHECK(r.records[i].seed == r.seeds[i]);
  }
  // A longer ensemble extends, not reshuffles, the shorter one.
  const auto longer = run_ensemble_serial(ctx, 6);
  for (int i = 0; i < 4; ++i) CHECK(same(longer.records[i], r.records[i]));
}

TEST_CASE("single-trajectory summary equals the record") {
  const auto ctx = TrajectoryContext::build(small_config());
  const auto r = run_ensemble_parallel(ctx, 1, 2);
  CHECK(r.summary.count == 1);
  CHECK(r.summary.entropy_mean(0) == r.records[0].entropy[0]);
  CHECK(r.summary.energy.mean == r.records[0].energy);
  for (double e : r.summary.entropy_stderr(0)) CHECK(e == 0.0);
}

TEST_CASE("failing trajectories are reported, not thrown") {
  auto ctx = TrajectoryContext::build(small_config());
  ctx.monitored_step.matrix.setZero();
  const auto r = run_ensemble_parallel(ctx, 3, 2);
  CHECK_FALSE(r.complete());
  CHECK(r.failed() == 3u);
  CHECK(r.failures[1].find("reorthonormalize") != std::string::npos);
  CHECK(r.summary.count == 0);
  CHECK(r.successful().empty());
  CHECK_THROWS_AS(run_ensemble_serial(ctx, 0), ConfigError);
}
