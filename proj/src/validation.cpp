#include "mchain/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mchain/fock_oracle.hpp"
#include "mchain/gaussian_state.hpp"
#include "mchain/trajectory.hpp"

namespace mchain {

ReplayDeviation fock_replay_deviation(int L, double nu, double gamma, double dt, int steps,
                                      unsigned long long seed) {
  SimConfig c;
  c.lattice.L = L;
  c.lattice.nu = nu;
  c.lattice.gamma = gamma;
  c.dt = dt;
  c.sample_interval = dt;
  c.t_max = dt * steps;
  for (int ell = 1; ell < L; ++ell) c.subsystem_sizes.push_back(ell);
  c.n_trajectories = 1;
  c.validate();
  const auto ctx = TrajectoryContext::build(c);
  const auto rec = run_quantum_jump_trajectory(ctx, seed);

  ReplayDeviation d;
  d.events = rec.events.size();
  CVector psi = fock::expand(ctx.initial);
  std::size_t next = 0;
  const int j0 = c.primary_site();
  for (std::size_t s = 0; s < rec.samples(); ++s) {
    if (s > 0) {
      psi = fock::normalized(fock::evolve(ctx.h_monitored, psi, dt));
      while (next < rec.events.size() && std::abs(rec.events[next].time - rec.times[s]) < 0.5 * dt) {
        psi = fock::project(psi, rec.events[next].site, rec.events[next].outcome);
        ++next;
      }
    }
    d.occupation = std::max(d.occupation, std::abs(fock::occupation(psi, j0) - rec.occupation[s]));
    d.energy = std::max(d.energy, std::abs(fock::expectation(ctx.h0, psi) - rec.energy[s]));
    for (std::size_t i = 0; i < rec.ells.size(); ++i)
      d.entropy = std::max(d.entropy,
                           std::abs(fock::entanglement_entropy(psi, L, rec.ells[i]) - rec.entropy[i][s]));
    ++d.samples;
  }
  if (next != rec.events.size()) d.entropy = std::numeric_limits<double>::infinity();
  return d;
}

namespace {

CheckResult check(std::string name, double error, double tol, std::string detail = {}) {
  return {std::move(name), error <= tol, error, tol, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> run_oracle_suite() {
  std::vector<CheckResult> out;

  for (auto [L, nu] : {std::pair{4, 0.25}, {4, 0.5}, {6, 0.25}, {6, 0.5}}) {
    // First seed whose record has at least two jumps.
    ReplayDeviation d;
    for (unsigned long long seed = 1; seed <= 64 && d.events < 2; ++seed)
      d = fock_replay_deviation(L, nu, 0.5, 0.05, 200, seed);
    std::ostringstream name;
    name << "fock replay L=" << L << " nu=" << nu;
    std::ostringstream det;
    det << d.events << " jumps, " << d.samples << " samples";
    out.push_back(check(name.str(), std::max({d.occupation, d.energy, d.entropy}), 1e-7, det.str()));
  }

  {
    SimConfig c;
    c.lattice.L = 32;
    c.lattice.gamma = 0.0;
    c.t_max = 100.0;
    c.subsystem_sizes = {8};
    c.protocol = Protocol::no_click;
    c.validate();
    const auto rec = run_no_click(TrajectoryContext::build(c));
    double ds = 0.0, de = 0.0;
    for (std::size_t s = 0; s < rec.samples(); ++s) {
      ds = std::max(ds, std::abs(rec.entropy[0][s] - rec.entropy[0][0]));
      de = std::max(de, std::abs(rec.energy[s] - rec.energy[0]));
    }
    out.push_back(check("fermi sea stationary (entropy)", ds, 1e-9));
    out.push_back(check("fermi sea stationary (energy)", de, 1e-9));
  }

  {
    SimConfig c;
    c.lattice.L = 32;
    c.lattice.gamma = 0.5;
    c.t_max = 100.0;
    c.subsystem_sizes = {8};
    c.protocol = Protocol::hermitian_quench;
    c.validate();
    const auto ctx = TrajectoryContext::build(c);
    GaussianState st = ctx.initial;
    const double e0 = expectation(st, ctx.h_quench);
    double de = 0.0;
    for (long long s = 0; s < c.n_steps(); ++s) {
      evolve_interval(st, ctx.quench_step, 1);
      de = std::max(de, std::abs(expectation(st, ctx.h_quench) - e0));
    }
    out.push_back(check("quench conserves H0 + V", de, 1e-9));
  }

  {
    LatticeSpec spec;
    spec.L = 64;
    const double nu = 0.25;
    const double expected = -nu * std::log(nu) - (1 - nu) * std::log(1 - nu);
    out.push_back(check("fermi sea S(ell=1)", std::abs(entanglement_entropy(fermi_sea(spec), 1) - expected),
                        1e-10));
  }
  {
    LatticeSpec spec;
    spec.L = 4;
    const double e = energy(fermi_sea(spec), build_hopping(spec));
    out.push_back(check("fermi sea energy L=4 nu=1/4", std::abs(e + 1.0), 1e-12));
  }
  return out;
}

}  // namespace mchain
