#include "mchain/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mchain {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

Moments moments(std::span<const double> x) {
  Moments m;
  m.n = static_cast<long long>(x.size());
  if (x.empty()) return m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    s2 += d * d;
    s3 += d * d * d;
    s4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m.stddev = x.size() > 1 ? std::sqrt(s2 / (n - 1.0)) : 0.0;
  m.m3 = s3 / n;
  m.m4 = s4 / n;
  return m;
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw ConfigError("quantile: no samples");
  std::sort(x.begin(), x.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double Histogram::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) s += density[i] * (edges[i + 1] - edges[i]);
  return s;
}

Histogram Histogram::from_samples(std::span<const double> samples, int bins) {
  if (samples.empty()) return Histogram{};
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> edges;
  if (hi - lo <= 0.0) {
    edges = {lo - 0.5, lo + 0.5};
  } else {
    int nb = bins;
    if (nb <= 0) {
      std::vector<double> v(samples.begin(), samples.end());
      const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
      const double n = static_cast<double>(samples.size());
      if (iqr > 0.0) {
        const double h = 2.0 * iqr / std::cbrt(n);
        nb = static_cast<int>(std::ceil((hi - lo) / h));
      } else {
        nb = static_cast<int>(std::ceil(std::log2(n))) + 1;
      }
      nb = std::clamp(nb, 1, 10000);
    }
    edges.resize(nb + 1);
    for (int i = 0; i <= nb; ++i) edges[i] = lo + (hi - lo) * i / nb;
    edges.back() = hi;
  }
  return from_samples(samples, std::move(edges));
}

Histogram Histogram::from_samples(std::span<const double> samples, std::vector<double> edges) {
  if (edges.size() < 2) throw ConfigError("histogram: need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1])) throw ConfigError("histogram: edges must increase strictly");
  Histogram h;
  h.edges = std::move(edges);
  const std::size_t nb = h.edges.size() - 1;
  h.counts.assign(nb, 0);
  for (double v : samples) {
    if (v < h.edges.front() || v > h.edges.back() || !std::isfinite(v)) {
      ++h.out_of_range;
      continue;
    }
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), v);
    std::size_t b = static_cast<std::size_t>(it - h.edges.begin());
    b = b == 0 ? 0 : b - 1;
    if (b >= nb) b = nb - 1;  // right edge is closed
    ++h.counts[b];
  }
  h.n = static_cast<long long>(samples.size());
  const long long inside = h.n - h.out_of_range;
  h.density.assign(nb, 0.0);
  if (inside > 0)
    for (std::size_t i = 0; i < nb; ++i)
      h.density[i] = static_cast<double>(h.counts[i]) /
                     (static_cast<double>(inside) * (h.edges[i + 1] - h.edges[i]));
  const Moments m = moments(samples);
  h.mean = m.mean;
  h.stddev = m.stddev;
  h.m3 = m.m3;
  h.stderr_mean = m.n > 1 ? m.stddev / std::sqrt(static_cast<double>(m.n)) : 0.0;
  return h;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("linear_fit: length mismatch");
  LinearFit f;
  f.points = x.size();
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw ConfigError("linear_fit: need at least two points");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("linear_fit: abscissa has zero spread");
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  f.adj_r2 = x.size() > 2 ? 1.0 - (1.0 - f.r2) * (n - 1.0) / (n - 2.0) : f.r2;
  f.slope_err = x.size() > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return f;
}

void RunningSeries::add(std::span<const double> values, long long count_before) {
  if (mean.empty()) {
    mean.assign(values.size(), 0.0);
    m2.assign(values.size(), 0.0);
  }
  if (values.size() != mean.size()) throw ConfigError("ensemble: sample grid mismatch");
  const double n1 = static_cast<double>(count_before + 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean[i];
    mean[i] += d / n1;
    m2[i] += d * (values[i] - mean[i]);
  }
}

void RunningSeries::merge(const RunningSeries& other, long long n_self, long long n_other) {
  if (n_other == 0) return;
  if (n_self == 0) {
    *this = other;
    return;
  }
  if (other.mean.size() != mean.size()) throw ConfigError("ensemble: sample grid mismatch");
  const double na = static_cast<double>(n_self), nb = static_cast<double>(n_other);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double d = other.mean[i] - mean[i];
    mean[i] = (na * mean[i] + nb * other.mean[i]) / n;
    m2[i] += other.m2[i] + d * d * na * nb / n;
  }
}

std::vector<double> RunningSeries::stderr_of_mean(long long count) const {
  std::vector<double> e(mean.size(), 0.0);
  if (count < 2) return e;
  const double n = static_cast<double>(count);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::sqrt(std::max(0.0, m2[i]) / (n - 1.0) / n);
  return e;
}

void EnsembleSummary::add(const TrajectoryRecord& r) {
  if (count == 0) {
    fingerprint = r.fingerprint;
    times = r.times;
    ells = r.ells;
    entropy.assign(ells.size(), RunningSeries{});
  } else {
    if (r.fingerprint != fingerprint) throw ConfigError("ensemble: config fingerprint mismatch");
    if (r.times.size() != times.size() || r.ells != ells)
      throw ConfigError("ensemble: sample grid mismatch");
    for (std::size_t i = 0; i < times.size(); ++i)
      if (std::abs(r.times[i] - times[i]) > 1e-9) throw ConfigError("ensemble: sample grid mismatch");
  }
  for (std::size_t i = 0; i < ells.size(); ++i) entropy[i].add(r.entropy[i], count);
  energy.add(r.energy, count);
  occupation.add(r.occupation, count);
  ++count;
}

void EnsembleSummary::merge(const EnsembleSummary& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  if (other.fingerprint != fingerprint) throw ConfigError("ensemble: config fingerprint mismatch");
  if (other.times.size() != times.size() || other.ells != ells)
    throw ConfigError("ensemble: sample grid mismatch");
  for (std::size_t i = 0; i < ells.size(); ++i) entropy[i].merge(other.entropy[i], count, other.count);
  energy.merge(other.energy, count, other.count);
  occupation.merge(other.occupation, count, other.count);
  count += other.count;
}

std::vector<double> EnsembleSummary::entropy_mean(std::size_t i, bool subtract_baseline) const {
  std::vector<double> m = entropy.at(i).mean;
  if (subtract_baseline && !m.empty()) {
    const double s0 = m.front();
    for (double& v : m) v -= s0;
  }
  return m;
}

std::vector<double> EnsembleSummary::entropy_stderr(std::size_t i) const {
  return entropy.at(i).stderr_of_mean(count);
}

std::size_t EnsembleSummary::ell_index(int ell) const {
  for (std::size_t i = 0; i < ells.size(); ++i)
    if (ells[i] == ell) return i;
  throw ConfigError("ensemble: subsystem size " + std::to_string(ell) + " not recorded");
}

EnsembleSummary ensemble_average(std::span<const TrajectoryRecord> records) {
  EnsembleSummary s;
  for (const auto& r : records) s.add(r);
  return s;
}

namespace {

template <class Fn>
void for_each_event(std::span<const TrajectoryRecord> records, EventFilter f, Fn&& fn) {
  for (const auto& r : records) {
    bool first = true;
    for (std::size_t k = 0; k < r.events.size(); ++k) {
      const auto& e = r.events[k];
      if (e.skipped) continue;
      const bool initial = first;
      first = false;
      if (initial && !f.include_initial) continue;
      fn(r, k, e);
    }
  }
}

}  // namespace

std::vector<double> pooled_waiting_times(std::span<const TrajectoryRecord> records, EventFilter f) {
  std::vector<double> taus;
  for_each_event(records, f, [&](const auto&, std::size_t, const JumpEvent& e) { taus.push_back(e.tau); });
  return taus;
}

WaitingTimeStats waiting_time_stats(std::span<const double> taus, int bins, double tau_split) {
  if (taus.empty()) throw ConfigError("waiting_time_stats: no jump events");
  WaitingTimeStats w;
  w.histogram = Histogram::from_samples(taus, bins);
  const Moments m = moments(taus);
  w.mu = m.mean;
  w.sigma = m.stddev;
  w.ratio = m.mean > 0.0 ? m.stddev / m.mean : kNaN;
  // Delta method for sigma/mu using the sample moments.
  if (m.n > 2 && m.stddev > 0.0 && m.mean > 0.0) {
    const double n = static_cast<double>(m.n);
    const double s2 = m.stddev * m.stddev;
    const double var = (m.m4 - s2 * s2) / (4.0 * s2 * m.mean * m.mean * n) +
                       s2 * s2 / (std::pow(m.mean, 4) * n) - m.m3 / (std::pow(m.mean, 3) * n);
    w.ratio_stderr = std::sqrt(std::max(0.0, var));
  }
  w.tau_split = tau_split;
  double sum = 0.0;
  for (double t : taus)
    if (t > tau_split) {
      sum += t;
      ++w.dark_count;
    }
  w.dark_mean = w.dark_count > 0 ? sum / static_cast<double>(w.dark_count) : kNaN;
  return w;
}

WaitingTimeStats waiting_time_stats(std::span<const TrajectoryRecord> records, int bins,
                                    double tau_split, EventFilter f) {
  const auto taus = pooled_waiting_times(records, f);
  return waiting_time_stats(taus, bins, tau_split);
}

JumpChangeHistograms jump_change_histograms(std::span<const TrajectoryRecord> records, int bins,
                                            EventFilter f) {
  std::vector<double> qj, nh;
  for_each_event(records, f, [&](const auto&, std::size_t, const JumpEvent& e) {
    qj.push_back(e.dS_qj);
    nh.push_back(e.dS_nH / e.tau);
  });
  if (qj.empty()) throw ConfigError("jump_change_histograms: no jump events");
  return {Histogram::from_samples(qj, bins), Histogram::from_samples(nh, bins)};
}

ScalarSeries binned_means(std::span<const double> x, std::span<const double> y,
                          std::span<const double> edges) {
  if (x.size() != y.size()) throw ConfigError("binned_means: length mismatch");
  if (edges.size() < 2) throw ConfigError("binned_means: need at least two edges");
  const std::size_t nb = edges.size() - 1;
  std::vector<std::vector<double>> groups(nb);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < edges.front() || x[i] > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), x[i]);
    std::size_t b = static_cast<std::size_t>(it - edges.begin());
    b = b == 0 ? 0 : b - 1;
    if (b >= nb) b = nb - 1;
    groups[b].push_back(y[i]);
  }
  ScalarSeries s;
  for (std::size_t b = 0; b < nb; ++b) {
    s.x.push_back(0.5 * (edges[b] + edges[b + 1]));
    const Moments m = moments(groups[b]);
    s.n.push_back(m.n);
    s.y.push_back(m.n > 0 ? m.mean : kNaN);
    s.err.push_back(m.n > 1 ? m.stddev / std::sqrt(static_cast<double>(m.n)) : kNaN);
  }
  return s;
}

std::vector<double> quantile_edges(std::span<const double> x, int bins) {
  if (x.empty() || bins < 1) throw ConfigError("quantile_edges: need samples and bins >= 1");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  std::vector<double> edges;
  for (int b = 0; b <= bins; ++b) {
    const double e = quantile(v, static_cast<double>(b) / bins);
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  if (edges.size() < 2) edges = {v.front() - 0.5, v.front() + 0.5};
  return edges;
}

ScalarSeries conditioned_jump_stats(std::span<const TrajectoryRecord> records,
                                    std::span<const double> tau_edges, EventFilter f) {
  std::vector<double> tau, ds;
  for_each_event(records, f, [&](const auto&, std::size_t, const JumpEvent& e) {
    tau.push_back(e.tau);
    ds.push_back(e.dS_qj);
  });
  return binned_means(tau, ds, tau_edges);
}

EnergyEntropyPairs energy_entropy_pairs(std::span<const TrajectoryRecord> records, EventFilter f) {
  EnergyEntropyPairs p;
  for_each_event(records, f, [&](const TrajectoryRecord& r, std::size_t k, const JumpEvent& e) {
    // The interval that follows jump k ends at the next real event.
    for (std::size_t n = k + 1; n < r.events.size(); ++n) {
      if (r.events[n].skipped) continue;
      p.dE.push_back(e.dE_qj);
      p.dS.push_back(e.dS_qj + r.events[n].dS_nH);
      p.tau.push_back(e.tau);
      break;
    }
  });
  return p;
}

ConditionedEntropy energy_conditioned_entropy(std::span<const TrajectoryRecord> records, double cut,
                                              int bins, EventFilter f) {
  const auto p = energy_entropy_pairs(records, f);
  std::vector<double> above, below;
  for (std::size_t i = 0; i < p.dE.size(); ++i) (p.dE[i] > cut ? above : below).push_back(p.dS[i]);
  ConditionedEntropy c;
  c.cut = cut;
  c.above = Histogram::from_samples(above, bins);
  c.below = Histogram::from_samples(below, bins);
  return c;
}

double pearson(std::span<const double> x, std::span<const double> y, bool* defined) {
  if (x.size() != y.size()) throw ConfigError("pearson: length mismatch");
  const Moments mx = moments(x), my = moments(y);
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx.mean) * (y[i] - my.mean);
  const bool ok = x.size() > 1 && mx.stddev > 0.0 && my.stddev > 0.0;
  if (defined) *defined = ok;
  if (!ok) return kNaN;
  return sxy / (static_cast<double>(x.size() - 1) * mx.stddev * my.stddev);
}

Correlation energy_entropy_correlation(std::span<const TrajectoryRecord> records, int bins,
                                       EventFilter f) {
  const auto p = energy_entropy_pairs(records, f);
  if (p.dE.size() < 10) throw ConfigError("energy_entropy_correlation: need at least 10 events");
  Correlation c;
  c.pearson = pearson(p.dE, p.dS, &c.defined);
  c.binned = binned_means(p.dE, p.dS, quantile_edges(p.dE, bins));
  return c;
}

std::vector<double> gaussian_smooth(std::span<const double> t, std::span<const double> y, double width) {
  if (t.size() != y.size()) throw ConfigError("gaussian_smooth: length mismatch");
  std::vector<double> out(y.begin(), y.end());
  if (width <= 0.0 || y.size() < 2) return out;
  const double reach = 4.0 * width;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    while (t[lo] < t[i] - reach) ++lo;
    double wsum = 0.0, acc = 0.0;
    for (std::size_t j = lo; j < t.size() && t[j] <= t[i] + reach; ++j) {
      const double d = (t[j] - t[i]) / width;
      const double w = std::exp(-0.5 * d * d);
      wsum += w;
      acc += w * y[j];
    }
    out[i] = acc / wsum;
  }
  return out;
}

double tail_mean(std::span<const double> y, double tail_fraction) {
  if (y.empty()) throw ConfigError("tail_mean: empty series");
  const auto n = y.size();
  const auto k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * n)));
  return std::accumulate(y.end() - static_cast<std::ptrdiff_t>(k), y.end(), 0.0) / static_cast<double>(k);
}

SaturationResult saturation_time(std::span<const double> t, std::span<const double> y, double epsilon,
                                 double kernel_width, double tail_fraction) {
  if (t.size() != y.size() || t.empty()) throw ConfigError("saturation_time: bad series");
  SaturationResult r;
  r.smoothed = gaussian_smooth(t, y, kernel_width);
  r.s_inf = tail_mean(r.smoothed, tail_fraction);
  // Latest violation; saturation starts at the sample after it.
  std::ptrdiff_t last_bad = -1;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(t.size()) - 1; i >= 0; --i) {
    if (std::abs(r.smoothed[i] - r.s_inf) > epsilon) {
      last_bad = i;
      break;
    }
  }
  if (last_bad == static_cast<std::ptrdiff_t>(t.size()) - 1) return r;
  r.tau_inf = last_bad < 0 ? t.front() : t[static_cast<std::size_t>(last_bad) + 1];
  return r;
}

Velocity growth_velocity(std::span<const double> t, std::span<const double> y,
                         std::optional<std::pair<double, double>> window, double kernel_width,
                         double tail_fraction) {
  if (t.size() != y.size() || t.empty()) throw ConfigError("growth_velocity: bad series");
  double t0, t1;
  if (window) {
    t0 = window->first;
    t1 = window->second;
  } else {
    const auto sm = gaussian_smooth(t, y, kernel_width);
    const double base = sm.front();
    const double top = tail_mean(sm, tail_fraction) - base;
    std::size_t i10 = t.size() - 1, i50 = t.size() - 1;
    bool found10 = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = sm[i] - base;
      if (!found10 && g >= 0.1 * top) {
        i10 = i;
        found10 = true;
      }
      if (found10 && g >= 0.5 * top) {
        i50 = i;
        break;
      }
    }
    t0 = t[i10];
    t1 = t[i50];
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t0 - 1e-12 && t[i] <= t1 + 1e-12) {
      xs.push_back(t[i]);
      ys.push_back(y[i]);
    }
  if (xs.size() < 5) {
    std::ostringstream os;
    os << "growth_velocity: window [" << t0 << ", " << t1 << "] holds " << xs.size()
       << " samples, need >= 5";
    throw ConfigError(os.str());
  }
  const LinearFit f = linear_fit(xs, ys);
  return {f.slope, f.slope_err, t0, t1, xs.size()};
}

ScalingFit steady_scaling(std::span<const int> ells, std::span<const double> s_inf) {
  if (ells.size() != s_inf.size()) throw ConfigError("steady_scaling: length mismatch");
  ScalingFit fit;
  std::vector<double> x, lx, y;
  for (std::size_t i = 0; i < ells.size(); ++i) {
    fit.points.x.push_back(ells[i]);
    fit.points.y.push_back(s_inf[i]);
    if (ells[i] >= 4) {
      x.push_back(ells[i]);
      lx.push_back(std::log(static_cast<double>(ells[i])));
      y.push_back(s_inf[i]);
    }
  }
  if (x.size() < 2) throw ConfigError("steady_scaling: need two subsystem sizes >= 4");
  fit.linear = linear_fit(x, y);
  fit.logarithmic = linear_fit(lx, y);
  fit.linear_preferred = fit.linear.adj_r2 > fit.logarithmic.adj_r2;
  return fit;
}

}  // namespace mchain
