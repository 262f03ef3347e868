#include "mchain/trajectory.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace mchain {

Propagator make_propagator(const SingleParticleOperator& op, double dt) {
  if (!(dt > 0.0)) throw ConfigError("make_propagator: dt must be > 0");
  if (!op.matrix.allFinite()) throw NumericalError("make_propagator: non-finite generator");
  Propagator p;
  p.source_kind = op.kind;
  p.dt = dt;
  if (op.is_hermitian()) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(op.matrix);
    if (es.info() != Eigen::Success) throw NumericalError("make_propagator: eigensolver failed");
    const CMatrix& v = es.eigenvectors();
    CVector phase(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) phase(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
    p.matrix = v * phase.asDiagonal() * v.adjoint();
  } else {
    CMatrix gen = cplx(0.0, -dt) * op.matrix;
    p.matrix = gen.exp();
  }
  if (!p.matrix.allFinite()) throw NumericalError("make_propagator: non-finite propagator");
  return p;
}

void evolve_interval(GaussianState& state, const Propagator& prop, long long steps) {
  if (prop.matrix.rows() != state.sites())
    throw ConfigError("evolve_interval: propagator dimension mismatch");
  CMatrix& U = state.orbitals();
  CMatrix tmp(U.rows(), U.cols());
  for (long long s = 0; s < steps; ++s) {
    tmp.noalias() = prop.matrix * U;
    U.swap(tmp);
    reorthonormalize(state);
  }
}

double jump_probability(const GaussianState& state, int site, double gamma, double dt) {
  if (gamma * dt > 0.1 + 1e-12) {
    std::ostringstream os;
    os << "jump_probability: gamma*dt = " << gamma * dt << " exceeds the 0.1 step guard";
    throw ConfigError(os.str());
  }
  return gamma * dt * occupation(state, site);
}

void apply_number_projection(GaussianState& state, int site, int outcome) {
  if (site < 0 || site >= state.sites()) throw ConfigError("projection: site out of range");
  if (outcome != 0 && outcome != 1) throw ConfigError("projection: outcome must be 0 or 1");
  const double n = occupation(state, site);
  CMatrix& U = state.orbitals();
  if (outcome == 1) {
    if (n < 1e-10) {
      std::ostringstream os;
      os << "projection: outcome 1 on site " << site << " with <n> = " << n;
      throw ImpossibleOutcomeError(os.str());
    }
    Eigen::Index pivot = 0;
    U.row(site).cwiseAbs().maxCoeff(&pivot);
    const cplx a = U(site, pivot);
    for (Eigen::Index k = 0; k < U.cols(); ++k) {
      if (k == pivot) continue;
      const cplx f = U(site, k) / a;
      U.col(k) -= f * U.col(pivot);
      U(site, k) = 0.0;
    }
    U.col(pivot).setZero();
    U(site, pivot) = 1.0;
  } else {
    if (1.0 - n < 1e-10) {
      std::ostringstream os;
      os << "projection: outcome 0 on site " << site << " with <n> = " << n;
      throw ImpossibleOutcomeError(os.str());
    }
    U.row(site).setZero();
  }
  reorthonormalize(state);
}

void TrajectoryRecord::check_invariants(double sample_interval) const {
  auto fail = [](const std::string& what) { throw NumericalError("trajectory record: " + what); };
  const std::size_t n = times.size();
  if (entropy.size() != ells.size()) fail("entropy series count != ell count");
  for (const auto& s : entropy)
    if (s.size() != n) fail("entropy series length mismatch");
  if (energy.size() != n || occupation.size() != n) fail("observable series length mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(times[i] - static_cast<double>(i) * sample_interval) > 1e-9 * (1.0 + times[i]))
      fail("sample times are not a uniform grid");
  double prev = 0.0;
  for (const auto& e : events) {
    if (!(e.time > prev) && !(e.skipped && e.time >= prev)) fail("event times not increasing");
    if (!e.skipped && !(e.tau > 0.0)) fail("non-positive waiting time");
    if (n > 0 && e.time > times.back() + 1e-9) fail("event after the last sample");
    prev = e.time;
  }
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

TrajectoryContext TrajectoryContext::build(const SimConfig& config) {
  config.validate();
  TrajectoryContext ctx;
  ctx.config = config;
  ctx.fingerprint = config.fingerprint();
  ctx.h0 = build_hopping(config.lattice);
  ctx.h_monitored = build_monitored_hamiltonian(ctx.h0, config.lattice);
  ctx.h_quench = build_real_potential(ctx.h0, config.primary_site(), config.lattice.gamma);
  ctx.monitored_step = make_propagator(ctx.h_monitored, config.dt);
  ctx.quench_step = make_propagator(ctx.h_quench, config.dt);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ctx.h0.matrix);
  ctx.h0_vectors = es.eigenvectors();
  ctx.h0_energies = es.eigenvalues();
  ctx.initial = fermi_sea(config.lattice);
  return ctx;
}

namespace {

// 53-bit uniforms and unit exponentials from a 64-bit Mersenne twister, so
// streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double exponential() { return -std::log1p(-uniform()); }

 private:
  std::mt19937_64 gen_;
};

class Recorder {
 public:
  Recorder(const TrajectoryContext& ctx, std::uint64_t seed) : ctx_(ctx) {
    const auto& c = ctx.config;
    rec_.fingerprint = ctx.fingerprint;
    rec_.protocol = c.protocol;
    rec_.seed = seed;
    rec_.ells = c.subsystem_sizes;
    rec_.entropy.resize(c.subsystem_sizes.size());
    const auto n = static_cast<std::size_t>(c.sample_count());
    rec_.times.reserve(n);
    rec_.energy.reserve(n);
    rec_.occupation.reserve(n);
    for (auto& s : rec_.entropy) s.reserve(n);
  }

  void sample(const GaussianState& state, long long index) {
    const auto& c = ctx_.config;
    rec_.times.push_back(static_cast<double>(index) * c.sample_interval);
    for (std::size_t i = 0; i < c.subsystem_sizes.size(); ++i)
      rec_.entropy[i].push_back(entanglement_entropy(state, c.subsystem_sizes[i], c.subsystem_offset));
    rec_.energy.push_back(energy(state, ctx_.h0));
    rec_.occupation.push_back(occupation(state, c.primary_site()));
  }

  double event_entropy(const GaussianState& state) const {
    return entanglement_entropy(state, ctx_.config.event_ell(), ctx_.config.subsystem_offset);
  }

  // Start of the first interval.
  void begin(const GaussianState& state) { s_after_last_ = event_entropy(state); }

  // Project `site` onto `outcome` at time t and log the event.
  void project(GaussianState& state, double t, int site, int outcome) {
    const double s_before = event_entropy(state);
    const double e_before = energy(state, ctx_.h0);
    apply_number_projection(state, site, outcome);
    const double s_after = event_entropy(state);
    JumpEvent ev;
    ev.time = t;
    ev.site = site;
    ev.tau = t - t_last_;
    ev.dS_qj = s_after - s_before;
    ev.dS_nH = s_before - s_after_last_;
    ev.dE_qj = energy(state, ctx_.h0) - e_before;
    ev.outcome = outcome;
    rec_.events.push_back(ev);
    t_last_ = t;
    s_after_last_ = s_after;
  }

  void skip(double t, int site) {
    JumpEvent ev;
    ev.time = t;
    ev.site = site;
    ev.tau = t - t_last_;
    ev.skipped = true;
    rec_.events.push_back(ev);
  }

  TrajectoryRecord take() { return std::move(rec_); }

 private:
  const TrajectoryContext& ctx_;
  TrajectoryRecord rec_;
  double t_last_ = 0.0;
  double s_after_last_ = 0.0;
};

void require_protocol(const TrajectoryContext& ctx, Protocol p, const char* who) {
  if (ctx.config.protocol != p)
    throw ConfigError(std::string(who) + ": config protocol is " + to_string(ctx.config.protocol));
}

// Deterministic evolution on the dt grid with an optional fixed jump schedule.
TrajectoryRecord run_grid(const TrajectoryContext& ctx, const Propagator& prop,
                          long long jump_every) {
  const auto& c = ctx.config;
  Recorder rec(ctx, 0);
  GaussianState state = ctx.initial;
  rec.begin(state);
  rec.sample(state, 0);
  const long long per_sample = c.steps_per_sample();
  const long long n_steps = c.n_steps();
  const int site = c.primary_site();
  for (long long k = 1; k <= n_steps; ++k) {
    evolve_interval(state, prop, 1);
    const double t = static_cast<double>(k) * c.dt;
    if (jump_every > 0 && k % jump_every == 0) {
      if (occupation(state, site) < 1e-10)
        rec.skip(t, site);
      else
        rec.project(state, t, site, 1);
    }
    if (k % per_sample == 0) rec.sample(state, k / per_sample);
  }
  return rec.take();
}

}  // namespace

TrajectoryRecord run_quantum_jump_trajectory(const TrajectoryContext& ctx, std::uint64_t seed) {
  require_protocol(ctx, Protocol::quantum_jump, "run_quantum_jump_trajectory");
  const auto& c = ctx.config;
  const auto& sites = c.lattice.monitored_sites;
  const double gamma = c.lattice.gamma;
  Rng rng(seed);
  Recorder rec(ctx, seed);
  GaussianState state = ctx.initial;
  rec.begin(state);
  rec.sample(state, 0);

  const long long per_sample = c.steps_per_sample();
  const long long n_steps = c.n_steps();
  std::vector<double> p(sites.size());
  // A step with total jump probability p contributes -ln(1-p) to the hazard;
  // a jump fires once the hazard passes a unit exponential threshold, which
  // is the same law as an independent Bernoulli(p) draw per step.
  double hazard = 0.0;
  double threshold = rng.exponential();
  for (long long k = 1; k <= n_steps; ++k) {
    evolve_interval(state, ctx.monitored_step, 1);
    const double t = static_cast<double>(k) * c.dt;
    if (gamma > 0.0) {
      double p_total = 0.0;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        p[i] = jump_probability(state, sites[i], gamma, c.dt);
        p_total += p[i];
      }
      hazard += -std::log1p(-p_total);
      if (hazard >= threshold) {
        const double u = rng.uniform() * p_total;
        std::size_t pick = 0;
        double acc = p[0];
        while (pick + 1 < sites.size() && acc <= u) acc += p[++pick];
        rec.project(state, t, sites[pick], 1);
        hazard = 0.0;
        threshold = rng.exponential();
      }
    }
    if (k % per_sample == 0) rec.sample(state, k / per_sample);
  }
  return rec.take();
}

TrajectoryRecord run_no_click(const TrajectoryContext& ctx) {
  require_protocol(ctx, Protocol::no_click, "run_no_click");
  return run_grid(ctx, ctx.monitored_step, 0);
}

TrajectoryRecord run_hermitian_quench(const TrajectoryContext& ctx) {
  require_protocol(ctx, Protocol::hermitian_quench, "run_hermitian_quench");
  return run_grid(ctx, ctx.quench_step, 0);
}

TrajectoryRecord run_fixed_interval(const TrajectoryContext& ctx, double delta_t) {
  require_protocol(ctx, Protocol::fixed_interval, "run_fixed_interval");
  SimConfig c = ctx.config;
  c.delta_t = delta_t;
  if (!(delta_t > 0.0)) throw ConfigError("run_fixed_interval: delta_t must be > 0");
  return run_grid(ctx, ctx.monitored_step, c.steps_per_fixed_jump());
}

TrajectoryRecord run_projective(const TrajectoryContext& ctx, std::uint64_t seed) {
  require_protocol(ctx, Protocol::projective, "run_projective");
  const auto& c = ctx.config;
  const double gamma = c.lattice.gamma;
  const int site = c.primary_site();
  Rng rng(seed);
  Recorder rec(ctx, seed);
  GaussianState state = ctx.initial;
  rec.begin(state);
  rec.sample(state, 0);

  const CMatrix& V = ctx.h0_vectors;
  CVector phase(V.cols());
  auto advance = [&](double span) {
    if (span <= 0.0) return;
    for (Eigen::Index k = 0; k < V.cols(); ++k) phase(k) = std::polar(1.0, -ctx.h0_energies(k) * span);
    CMatrix w = V.adjoint() * state.orbitals();
    w = phase.asDiagonal() * w;
    state.orbitals().noalias() = V * w;
    reorthonormalize(state);
  };

  const int n_samples = c.sample_count();
  double t = 0.0;
  double next = gamma > 0.0 ? rng.exponential() / gamma : std::numeric_limits<double>::infinity();
  for (int s = 1; s < n_samples; ++s) {
    const double t_sample = static_cast<double>(s) * c.sample_interval;
    while (next <= t_sample) {
      advance(next - t);
      t = next;
      const double n = occupation(state, site);
      int outcome = rng.uniform() < n ? 1 : 0;
      if (outcome == 1 && n < 1e-10) outcome = 0;
      if (outcome == 0 && 1.0 - n < 1e-10) outcome = 1;
      rec.project(state, t, site, outcome);
      next = t + rng.exponential() / gamma;
    }
    advance(t_sample - t);
    t = t_sample;
    rec.sample(state, s);
  }
  return rec.take();
}

TrajectoryRecord run_trajectory(const TrajectoryContext& ctx, std::uint64_t seed) {
  switch (ctx.config.protocol) {
    case Protocol::quantum_jump: return run_quantum_jump_trajectory(ctx, seed);
    case Protocol::no_click: return run_no_click(ctx);
    case Protocol::hermitian_quench: return run_hermitian_quench(ctx);
    case Protocol::fixed_interval: return run_fixed_interval(ctx, ctx.config.delta_t);
    case Protocol::projective: return run_projective(ctx, seed);
  }
  throw ConfigError("run_trajectory: unknown protocol");
}

}  // namespace mchain
