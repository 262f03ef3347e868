#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mchain/config.hpp"
#include "mchain/gaussian_state.hpp"
#include "mchain/lattice.hpp"

namespace mchain {

// M = exp(-i h dt).
struct Propagator {
  CMatrix matrix;
  OperatorKind source_kind = OperatorKind::hopping;
  double dt = 0.0;
};

// Spectral route for Hermitian generators, scaling-and-squaring Pade otherwise.
Propagator make_propagator(const SingleParticleOperator& op, double dt);

// U <- M U, re-orthonormalized after every application.
void evolve_interval(GaussianState& state, const Propagator& prop, long long steps);

// gamma * dt * <n_site>.  Throws ConfigError when gamma * dt > 0.1.
double jump_probability(const GaussianState& state, int site, double gamma, double dt);

// Normalized n_site|psi> (outcome 1) or (1 - n_site)|psi> (outcome 0).
void apply_number_projection(GaussianState& state, int site, int outcome);

struct JumpEvent {
  double time = 0.0;
  int site = 0;
  double tau = 0.0;    // since the previous event (or t = 0)
  double dS_qj = 0.0;  // across the projection
  double dS_nH = 0.0;  // accumulated over the preceding interval
  double dE_qj = 0.0;  // across the projection
  int outcome = 1;
  bool skipped = false;  // scheduled jump on an empty site (fixed_interval)
};

struct TrajectoryRecord {
  std::string fingerprint;
  Protocol protocol = Protocol::quantum_jump;
  std::uint64_t seed = 0;
  std::vector<int> ells;
  std::vector<double> times;
  std::vector<std::vector<double>> entropy;  // [ell index][sample]
  std::vector<double> energy;
  std::vector<double> occupation;  // <n> on the primary monitored site
  std::vector<JumpEvent> events;

  std::size_t samples() const { return times.size(); }
  // Throws NumericalError describing the first broken invariant.
  void check_invariants(double sample_interval) const;
};

// Read-only, shareable data for one configuration: operators, propagators,
// and the initial Fermi sea.
struct TrajectoryContext {
  SimConfig config;
  std::string fingerprint;
  SingleParticleOperator h0;
  SingleParticleOperator h_monitored;
  SingleParticleOperator h_quench;
  Propagator monitored_step;
  Propagator quench_step;
  // Spectral decomposition of h0 for continuous-time unitary segments.
  CMatrix h0_vectors;
  RVector h0_energies;
  GaussianState initial;

  static TrajectoryContext build(const SimConfig& config);
};

// Counter-based per-trajectory seed: splitmix64 of (master, index).
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

// Dispatch on config.protocol.
TrajectoryRecord run_trajectory(const TrajectoryContext& ctx, std::uint64_t seed);

TrajectoryRecord run_quantum_jump_trajectory(const TrajectoryContext& ctx, std::uint64_t seed);
TrajectoryRecord run_no_click(const TrajectoryContext& ctx);
TrajectoryRecord run_hermitian_quench(const TrajectoryContext& ctx);
TrajectoryRecord run_fixed_interval(const TrajectoryContext& ctx, double delta_t);
TrajectoryRecord run_projective(const TrajectoryContext& ctx, std::uint64_t seed);

}  // namespace mchain
