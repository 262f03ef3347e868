#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mchain/trajectory.hpp"

namespace mchain {

// Binned empirical distribution.  Moments always come from the raw samples,
// never from the bins.
struct Histogram {
  std::vector<double> edges;
  std::vector<long long> counts;
  std::vector<double> density;
  long long n = 0;             // all samples, including out_of_range
  long long out_of_range = 0;  // only possible with explicit edges
  double mean = 0.0;
  double stddev = 0.0;         // sample (n - 1) standard deviation
  double m3 = 0.0;             // third central moment
  double stderr_mean = 0.0;

  bool empty() const { return n == 0; }
  std::size_t bins() const { return counts.size(); }
  double integral() const;

  // bins == 0 selects the Freedman-Diaconis width.
  static Histogram from_samples(std::span<const double> samples, int bins = 0);
  static Histogram from_samples(std::span<const double> samples, std::vector<double> edges);
};

struct Moments {
  long long n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
};
Moments moments(std::span<const double> x);

// Linear-interpolated quantile (q in [0, 1]).
double quantile(std::vector<double> x, double q);

struct ScalarSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;     // may be empty
  std::vector<long long> n;    // per-point sample count, may be empty
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  std::size_t points = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// Running per-sample mean and squared deviations (Welford / Chan merge).
struct RunningSeries {
  std::vector<double> mean;
  std::vector<double> m2;

  void add(std::span<const double> values, long long count_before);
  void merge(const RunningSeries& other, long long n_self, long long n_other);
  std::vector<double> stderr_of_mean(long long count) const;
};

struct EnsembleSummary {
  std::string fingerprint;
  std::vector<double> times;
  std::vector<int> ells;
  long long count = 0;
  std::vector<RunningSeries> entropy;  // per ell
  RunningSeries energy;
  RunningSeries occupation;

  void add(const TrajectoryRecord& record);
  void merge(const EnsembleSummary& other);

  std::vector<double> entropy_mean(std::size_t ell_index, bool subtract_baseline = false) const;
  std::vector<double> entropy_stderr(std::size_t ell_index) const;
  std::size_t ell_index(int ell) const;
};

// Pointwise mean and standard error over records sharing one grid.
EnsembleSummary ensemble_average(std::span<const TrajectoryRecord> records);

// Events that count for jump statistics: real (not skipped) events, and by
// default not the first one, whose interval starts from the initial state
// rather than from a jump.
struct EventFilter {
  bool include_initial = false;
};

struct WaitingTimeStats {
  Histogram histogram;
  double mu = 0.0;
  double sigma = 0.0;
  double ratio = 0.0;         // sigma / mu
  double ratio_stderr = 0.0;  // delta method
  double tau_split = 0.0;
  double dark_mean = 0.0;     // mean of tau > tau_split
  long long dark_count = 0;
};
std::vector<double> pooled_waiting_times(std::span<const TrajectoryRecord> records, EventFilter f = {});
WaitingTimeStats waiting_time_stats(std::span<const double> taus, int bins, double tau_split);
WaitingTimeStats waiting_time_stats(std::span<const TrajectoryRecord> records, int bins,
                                    double tau_split, EventFilter f = {});

struct JumpChangeHistograms {
  Histogram dS_qj;
  Histogram dS_nH_rate;  // dS_nH / tau
};
JumpChangeHistograms jump_change_histograms(std::span<const TrajectoryRecord> records, int bins,
                                            EventFilter f = {});

// Mean dS_qj binned by the waiting time preceding the jump.  Empty bins have
// y = NaN and n = 0.
ScalarSeries conditioned_jump_stats(std::span<const TrajectoryRecord> records,
                                    std::span<const double> tau_edges, EventFilter f = {});

// (dE_qj of jump n, dS_qj of jump n + dS_nH of the interval that follows it),
// for every jump that has a following interval.
struct EnergyEntropyPairs {
  std::vector<double> dE;
  std::vector<double> dS;
  std::vector<double> tau;  // waiting time preceding the jump
};
EnergyEntropyPairs energy_entropy_pairs(std::span<const TrajectoryRecord> records, EventFilter f = {});

struct ConditionedEntropy {
  double cut = 0.0;
  Histogram above;  // dE_qj > cut
  Histogram below;  // dE_qj <= cut
};
ConditionedEntropy energy_conditioned_entropy(std::span<const TrajectoryRecord> records, double dE_cut,
                                              int bins = 0, EventFilter f = {});

// Mean of y in bins of x.
ScalarSeries binned_means(std::span<const double> x, std::span<const double> y,
                          std::span<const double> edges);

// Equal-count bin edges of x.
std::vector<double> quantile_edges(std::span<const double> x, int bins);

struct Correlation {
  double pearson = 0.0;
  bool defined = false;
  ScalarSeries binned;  // mean dS per dE bin
};
Correlation energy_entropy_correlation(std::span<const TrajectoryRecord> records, int bins = 10,
                                       EventFilter f = {});
double pearson(std::span<const double> x, std::span<const double> y, bool* defined = nullptr);

// Gaussian kernel smoothing in time units; weights renormalized at the edges.
std::vector<double> gaussian_smooth(std::span<const double> t, std::span<const double> y, double width);

struct SaturationResult {
  std::optional<double> tau_inf;  // empty when never saturated
  double s_inf = 0.0;
  std::vector<double> smoothed;
};
SaturationResult saturation_time(std::span<const double> t, std::span<const double> y, double epsilon,
                                 double kernel_width, double tail_fraction = 0.2);

struct Velocity {
  double v = 0.0;
  double err = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t points = 0;
};
// Least-squares slope of y(t) over the window.  Without an explicit window,
// the window is where the smoothed, baseline-subtracted series climbs from
// 10% to 50% of its final-window mean.  Throws ConfigError for < 5 points.
Velocity growth_velocity(std::span<const double> t, std::span<const double> y,
                         std::optional<std::pair<double, double>> window = std::nullopt,
                         double kernel_width = 0.0, double tail_fraction = 0.2);

struct ScalingFit {
  ScalarSeries points;  // (ell, S_inf)
  LinearFit linear;     // S = a + b ell
  LinearFit logarithmic;  // S = a + b ln ell
  bool linear_preferred = false;
};
// Tail means per ell, then linear vs logarithmic model by adjusted R^2 on ell >= 4.
ScalingFit steady_scaling(std::span<const int> ells, std::span<const double> s_inf);
double tail_mean(std::span<const double> y, double tail_fraction = 0.2);

}  // namespace mchain
