#pragma once

#include <vector>

#include "mchain/types.hpp"

namespace mchain {

class GaussianState;

// Chain geometry, filling and monitoring layout.
struct LatticeSpec {
  int L = 0;
  double J = 0.5;
  bool pbc = true;
  double nu = 0.25;
  std::vector<int> monitored_sites{0};
  double gamma = 0.0;

  // N = round(nu * L).
  int particle_count() const;

  // Throws ConfigError on any broken invariant.
  void validate() const;
};

enum class OperatorKind { hopping, non_hermitian_monitored, real_potential };

const char* to_string(OperatorKind kind);

struct SingleParticleOperator {
  CMatrix matrix;
  OperatorKind kind = OperatorKind::hopping;

  int dim() const { return static_cast<int>(matrix.rows()); }
  bool is_hermitian() const { return kind != OperatorKind::non_hermitian_monitored; }
};

// Tight-binding hopping -J (c+_{j+1} c_j + h.c.), optionally closed into a ring.
SingleParticleOperator build_hopping(const LatticeSpec& spec);

// h0 - i (gamma/2) sum_{j in monitored} n_j
SingleParticleOperator build_monitored_hamiltonian(const SingleParticleOperator& h0,
                                                   const LatticeSpec& spec);

// h0 + (gamma/2) n_{j0}
SingleParticleOperator build_real_potential(const SingleParticleOperator& h0, int j0, double gamma);

// Momentum order used to fill the Fermi sea: k = 0, +2pi/L, -2pi/L, +4pi/L, ...
// stable-sorted by band energy -2J cos k.  Returns the integers m with k = 2 pi m / L.
std::vector<int> fermi_sea_momenta(const LatticeSpec& spec);

// True when the N-th and (N+1)-th single-particle levels coincide.
bool fermi_level_open_shell(const LatticeSpec& spec);

// Ground state of the ring at filling nu, as N plane-wave orbitals e^{ikj}/sqrt(L).
// Requires pbc.  Warns (once per call) when the Fermi level is an open shell.
GaussianState fermi_sea(const LatticeSpec& spec);

// Evenly spaced monitoring positions j_k = floor(k L / n), k = 0..n-1.
std::vector<int> evenly_spaced_sites(int L, int n);

}  // namespace mchain
