#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "mchain/statistics.hpp"

using namespace mchain;

namespace {

struct Naive {
  double mean = 0, sd = 0, m3 = 0;
};
Naive naive(const std::vector<double>& x) {
  Naive r;
  const double n = static_cast<double>(x.size());
  for (double v : x) r.mean += v;
  r.mean /= n;
  double s2 = 0;
  for (double v : x) {
    s2 += (v - r.mean) * (v - r.mean);
    r.m3 += std::pow(v - r.mean, 3);
  }
  r.sd = std::sqrt(s2 / (n - 1));
  r.m3 /= n;
  return r;
}

// Record with the given events and a trivial sample grid.
TrajectoryRecord synthetic(const std::vector<JumpEvent>& events, std::vector<double> s = {0, 0}) {
  TrajectoryRecord r;
  r.fingerprint = "synthetic";
  r.ells = {4};
  for (std::size_t i = 0; i < s.size(); ++i) r.times.push_back(static_cast<double>(i));
  r.entropy = {s};
  r.energy.assign(s.size(), 0.0);
  r.occupation.assign(s.size(), 0.0);
  double t = 0;
  for (auto e : events) {
    t += e.tau;
    e.time = t;
    r.events.push_back(e);
  }
  return r;
}

JumpEvent ev(double tau, double dS_qj = 0, double dS_nH = 0, double dE = 0) {
  JumpEvent e;
  e.tau = tau;
  e.dS_qj = dS_qj;
  e.dS_nH = dS_nH;
  e.dE_qj = dE;
  return e;
}

std::vector<double> exponential_samples(double rate, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> d(rate);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

}  // namespace

TEST_CASE("histogram moments come from the raw samples") {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> g(2.0, 1.5);
  std::vector<double> x(3000);
  for (auto& v : x) v = g(rng);
  for (int bins : {0, 3, 50}) {
    const auto h = Histogram::from_samples(x, bins);
    const auto m = moments(x);
    CHECK(h.mean == m.mean);
    CHECK(h.stddev == m.stddev);
    CHECK(h.m3 == m.m3);
    const auto nv = naive(x);
    CHECK(h.mean == doctest::Approx(nv.mean).epsilon(1e-12));
    CHECK(h.stddev == doctest::Approx(nv.sd).epsilon(1e-12));
    CHECK(h.m3 == doctest::Approx(nv.m3).epsilon(1e-10));
    CHECK(h.integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::accumulate(h.counts.begin(), h.counts.end(), 0LL) == h.n);
    CHECK(h.stderr_mean == doctest::Approx(nv.sd / std::sqrt(3000.0)));
  }
}

TEST_CASE("Freedman-Diaconis bin count") {
  std::vector<double> x(1000);
  for (int i = 0; i < 1000; ++i) x[i] = i / 999.0;  // uniform grid on [0, 1]
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  const int expected = static_cast<int>(std::ceil(1.0 / (2 * iqr / std::cbrt(1000.0))));
  CHECK(Histogram::from_samples(x).bins() == static_cast<std::size_t>(expected));
  CHECK(expected == 10);
}

TEST_CASE("histogram edge cases") {
  CHECK(Histogram::from_samples(std::vector<double>{}).empty());
  const auto one = Histogram::from_samples(std::vector<double>{2.0, 2.0, 2.0});
  CHECK(one.bins() == 1u);
  CHECK(one.counts[0] == 3);
  CHECK(one.integral() == doctest::Approx(1.0));

  const std::vector<double> x{-1.0, 0.1, 0.5, 0.9, 1.0, 3.0};
  const auto h = Histogram::from_samples(x, std::vector<double>{0.0, 0.5, 1.0});
  CHECK(h.n == 6);
  CHECK(h.out_of_range == 2);
  CHECK(h.counts == std::vector<long long>{1, 3});
  CHECK(h.integral() == doctest::Approx(1.0));
  CHECK(h.mean == doctest::Approx(4.5 / 6));
  CHECK_THROWS_AS(Histogram::from_samples(x, std::vector<double>{0.0, 0.0}), ConfigError);
}

TEST_CASE("quantile interpolates linearly") {
  const std::vector<double> x{4, 1, 3, 2};
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 4.0);
  CHECK(quantile(x, 0.5) == doctest::Approx(2.5));
  CHECK(quantile(x, 1.0 / 3) == doctest::Approx(2.0));
}

TEST_CASE("Poisson waiting times: mu recovered, sigma/mu = 1") {
  const double r = 0.7;
  const auto taus = exponential_samples(r, 10000, 5);
  const auto w = waiting_time_stats(taus, 0, 5.0 / r);
  const double se = w.sigma / std::sqrt(10000.0);
  CHECK(std::abs(w.mu - 1 / r) < 3 * se);
  CHECK(std::abs(w.ratio - 1.0) < 3 * w.ratio_stderr);
  // Exponential: sigma/mu has asymptotic standard error 1/sqrt(n).
  CHECK(w.ratio_stderr == doctest::Approx(0.01).epsilon(0.15));
  // Memorylessness: the mean beyond the split is split + 1/r.
  CHECK(w.dark_mean == doctest::Approx(5.0 / r + 1 / r).epsilon(0.1));
}

TEST_CASE("mixture of two rates is super-Poissonian") {
  auto fast = exponential_samples(2.0, 5000, 1);
  const auto slow = exponential_samples(0.05, 500, 2);
  fast.insert(fast.end(), slow.begin(), slow.end());
  const auto w = waiting_time_stats(fast, 0, 2.5);
  CHECK(w.ratio > 1.0 + 3 * w.ratio_stderr);
}

TEST_CASE("event filter drops the interval that starts from the initial state") {
  const std::vector<TrajectoryRecord> recs{synthetic({ev(10), ev(1), ev(2)}), synthetic({ev(7)})};
  CHECK(pooled_waiting_times(recs) == std::vector<double>{1, 2});
  CHECK(pooled_waiting_times(recs, {true}) == std::vector<double>{10, 1, 2, 7});
  auto skipped = ev(3);
  skipped.skipped = true;
  const std::vector<TrajectoryRecord> with_skip{synthetic({skipped, ev(10), ev(1)})};
  CHECK(pooled_waiting_times(with_skip) == std::vector<double>{1});
  CHECK_THROWS_AS(waiting_time_stats(std::vector<TrajectoryRecord>{synthetic({ev(1)})}, 0, 1.0),
                  ConfigError);
}

TEST_CASE("jump-change histograms and tau conditioning") {
  const std::vector<TrajectoryRecord> recs{
      synthetic({ev(1), ev(2, -0.2, 0.4), ev(4, -0.4, 0.4), ev(1, -0.1, 0.3)})};
  const auto h = jump_change_histograms(recs, 0);
  CHECK(h.dS_qj.n == 3);
  CHECK(h.dS_qj.mean == doctest::Approx(-0.7 / 3));
  CHECK(h.dS_nH_rate.mean == doctest::Approx((0.2 + 0.1 + 0.3) / 3));

  const std::vector<double> edges{0, 1.5, 5};
  const auto s = conditioned_jump_stats(recs, edges);
  REQUIRE(s.y.size() == 2u);
  CHECK(s.y[0] == doctest::Approx(-0.1));
  CHECK(s.y[1] == doctest::Approx(-0.3));
  CHECK(s.n == std::vector<long long>{1, 2});
}

TEST_CASE("binned means") {
  const std::vector<double> x{1, 2, 3, 4}, y{10, 20, 30, 40};
  const auto all = binned_means(x, y, std::vector<double>{0, 10});
  REQUIRE(all.y.size() == 1u);
  CHECK(all.y[0] == doctest::Approx(25));
  const auto two = binned_means(x, y, std::vector<double>{0, 2.5, 10});
  CHECK(two.y[0] == doctest::Approx(15));
  CHECK(two.y[1] == doctest::Approx(35));
  const auto gap = binned_means(x, y, std::vector<double>{0, 5, 6});
  CHECK(std::isnan(gap.y[1]));
  CHECK(gap.n[1] == 0);
  const auto qe = quantile_edges(std::vector<double>{1, 2, 3, 4, 5}, 2);
  CHECK(qe.size() == 3u);
  CHECK(qe.front() == 1);
  CHECK(qe[1] == doctest::Approx(3));
}

TEST_CASE("energy-entropy pairs use the interval after the jump") {
  // jump n pairs dS_qj(n) with dS_nH(n + 1)
  const std::vector<TrajectoryRecord> recs{
      synthetic({ev(1), ev(1, -0.5, 0.0, 0.1), ev(1, -0.2, 0.9, 0.3), ev(1, -0.1, 0.4, 0.2)})};
  const auto p = energy_entropy_pairs(recs);
  REQUIRE(p.dE.size() == 2u);
  CHECK(p.dE[0] == 0.1);
  CHECK(p.dS[0] == doctest::Approx(-0.5 + 0.9));
  CHECK(p.dS[1] == doctest::Approx(-0.2 + 0.4));

  const auto below_all = energy_conditioned_entropy(recs, -1.0);
  CHECK(below_all.below.empty());
  CHECK(below_all.above.n == 2);
  const auto split = energy_conditioned_entropy(recs, 0.2);
  CHECK(split.above.n == 1);
  CHECK(split.above.mean == doctest::Approx(0.2));
  CHECK(split.below.mean == doctest::Approx(0.4));
}

TEST_CASE("pearson correlation") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<double> x(2000), y(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = g(rng);
    y[i] = 2 * x[i];
  }
  CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  // Permutation null: shuffled pairing is uncorrelated within sampling error.
  std::shuffle(y.begin(), y.end(), rng);
  CHECK(std::abs(pearson(x, y)) < 4.0 / std::sqrt(2000.0));
  bool defined = true;
  std::vector<double> flat(10, 1.0);
  CHECK(std::isnan(pearson(flat, flat, &defined)));
  CHECK_FALSE(defined);

  std::vector<JumpEvent> evs{ev(1)};
  for (int i = 0; i < 30; ++i) evs.push_back(ev(1, 0.0, i % 2 ? 0.1 : 0.0, 0.05 * i));
  const std::vector<TrajectoryRecord> recs{synthetic(evs)};
  const auto c = energy_entropy_correlation(recs);
  CHECK(c.defined);
  CHECK(std::abs(c.pearson) < 0.5);
  CHECK_THROWS_AS(energy_entropy_correlation(std::vector<TrajectoryRecord>{synthetic({ev(1), ev(1)})}),
                  ConfigError);
}

TEST_CASE("linear fit") {
  std::vector<double> t, y;
  for (int i = 0; i < 50; ++i) {
    t.push_back(i * 0.5);
    y.push_back(3 + 0.1 * i * 0.5);
  }
  const auto f = linear_fit(t, y);
  CHECK(f.slope == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(3).epsilon(1e-12));
  CHECK(f.slope_err < 1e-12);
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK_THROWS_AS(linear_fit(std::vector<double>{1, 1}, std::vector<double>{0, 1}), ConfigError);
}

TEST_CASE("growth velocity") {
  std::vector<double> t, lin, flat;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 0.01);
  for (int i = 0; i <= 400; ++i) {
    t.push_back(i * 0.5);
    lin.push_back(0.1 * t.back());
    flat.push_back(2.0 + g(rng));
  }
  const auto v = growth_velocity(t, lin, std::pair{10.0, 50.0});
  CHECK(v.v == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(v.points == 81u);
  const auto f = growth_velocity(t, flat, std::pair{0.0, 200.0});
  CHECK(std::abs(f.v) < 3 * f.err + 1e-12);
  CHECK_THROWS_AS(growth_velocity(t, lin, std::pair{10.0, 11.0}), ConfigError);

  // Default window on a saturating curve sits in the rising part.
  std::vector<double> sat;
  for (double x : t) sat.push_back(1.0 - std::exp(-x / 40.0));
  const auto d = growth_velocity(t, sat, std::nullopt, 1.0);
  CHECK(d.t_start < d.t_end);
  const double top = tail_mean(sat, 0.2);
  // Within a kernel width of the closed-form crossings.
  CHECK(std::abs(d.t_start + 40 * std::log(1 - 0.1 * top)) <= 1.0);
  CHECK(std::abs(d.t_end + 40 * std::log(1 - 0.5 * top)) <= 1.0);
  CHECK(d.v > 0);
}

TEST_CASE("saturation time") {
  std::vector<double> t, c, s;
  const double T = 20, S = 2, eps = 0.05, width = 2.0;
  for (int i = 0; i <= 2000; ++i) {
    t.push_back(i * 0.25);
    c.push_back(1.5);
    s.push_back(S * (1 - std::exp(-t.back() / T)));
  }
  const auto rc = saturation_time(t, c, eps, width);
  REQUIRE(rc.tau_inf);
  CHECK(*rc.tau_inf == 0.0);
  CHECK(rc.s_inf == doctest::Approx(1.5));

  const auto rs = saturation_time(t, s, eps, width);
  REQUIRE(rs.tau_inf);
  CHECK(std::abs(*rs.tau_inf - T * std::log(S / eps)) < width);

  // Larger epsilon never saturates later.
  double prev = 1e300;
  for (double e : {0.01, 0.02, 0.05, 0.1, 0.3, 1.0}) {
    const auto r = saturation_time(t, s, e, width);
    REQUIRE(r.tau_inf);
    CHECK(*r.tau_inf <= prev);
    prev = *r.tau_inf;
  }

  // Still climbing at the end: no saturation.
  std::vector<double> ramp;
  for (double x : t) ramp.push_back(x);
  CHECK_FALSE(saturation_time(t, ramp, eps, width).tau_inf);
}

TEST_CASE("gaussian smoothing keeps constants and linear trends in the bulk") {
  std::vector<double> t, y, c;
  for (int i = 0; i < 200; ++i) {
    t.push_back(i * 0.1);
    y.push_back(0.3 * i);
    c.push_back(4.0);
  }
  const auto sc = gaussian_smooth(t, c, 1.0);
  for (double v : sc) CHECK(v == doctest::Approx(4.0));
  const auto sy = gaussian_smooth(t, y, 0.5);
  CHECK(sy[100] == doctest::Approx(y[100]).epsilon(1e-9));
}

TEST_CASE("steady-state scaling") {
  const std::vector<int> ells{4, 8, 12, 16, 20};
  std::vector<double> vol, logs;
  for (int l : ells) {
    vol.push_back(0.3 * l);
    logs.push_back(0.5 + std::log(l) / 3);
  }
  const auto v = steady_scaling(ells, vol);
  CHECK(v.linear.slope == doctest::Approx(0.3));
  CHECK(v.linear_preferred);
  const auto lg = steady_scaling(ells, logs);
  CHECK_FALSE(lg.linear_preferred);
  CHECK(lg.logarithmic.slope == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(steady_scaling(std::vector<int>{2, 4}, std::vector<double>{1, 2}), ConfigError);
  CHECK(tail_mean(std::vector<double>{0, 0, 0, 0, 0, 0, 0, 0, 5, 7}, 0.2) == doctest::Approx(6));
}

TEST_CASE("ensemble average: mean, permutation invariance, merge associativity") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  std::vector<TrajectoryRecord> recs;
  for (int k = 0; k < 13; ++k) {
    std::vector<double> s(30);
    for (auto& v : s) v = g(rng);
    auto r = synthetic({}, s);
    for (auto& e : r.energy) e = g(rng);
    recs.push_back(r);
  }
  const auto all = ensemble_average(recs);
  CHECK(all.count == 13);
  for (std::size_t i = 0; i < 30; ++i) {
    double m = 0;
    for (const auto& r : recs) m += r.entropy[0][i];
    m /= 13;
    CHECK(all.entropy_mean(0)[i] == doctest::Approx(m).epsilon(1e-12));
    double v = 0;
    for (const auto& r : recs) v += (r.entropy[0][i] - m) * (r.entropy[0][i] - m);
    CHECK(all.entropy_stderr(0)[i] == doctest::Approx(std::sqrt(v / 12 / 13)).epsilon(1e-12));
  }
  CHECK(all.entropy_mean(0, true)[0] == 0.0);

  auto shuffled = recs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  const auto perm = ensemble_average(shuffled);

  auto a = ensemble_average(std::span(recs).subspan(0, 5));
  const auto b = ensemble_average(std::span(recs).subspan(5, 4));
  const auto c = ensemble_average(std::span(recs).subspan(9));
  auto bc = b;
  bc.merge(c);
  auto left = a;
  left.merge(b);
  left.merge(c);
  a.merge(bc);
  for (const EnsembleSummary* s : std::initializer_list<const EnsembleSummary*>{&perm, &left, &a}) {
    CHECK(s->count == 13);
    for (std::size_t i = 0; i < 30; ++i) {
      CHECK(std::abs(s->entropy_mean(0)[i] - all.entropy_mean(0)[i]) < 1e-12);
      CHECK(std::abs(s->entropy_stderr(0)[i] - all.entropy_stderr(0)[i]) < 1e-12);
      CHECK(std::abs(s->energy.mean[i] - all.energy.mean[i]) < 1e-12);
    }
  }

  auto other = recs[0];
  other.fingerprint = "different";
  auto mix = ensemble_average(std::span(recs).subspan(0, 2));
  CHECK_THROWS_AS(mix.add(other), ConfigError);
  CHECK_THROWS_AS(all.ell_index(99), ConfigError);
}
