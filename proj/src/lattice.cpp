#include "mchain/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "mchain/gaussian_state.hpp"
#include "mchain/log.hpp"

namespace mchain {

int LatticeSpec::particle_count() const {
  return static_cast<int>(std::lround(nu * L));
}

void LatticeSpec::validate() const {
  if (L < 2) throw ConfigError("lattice: L must be >= 2, got " + std::to_string(L));
  if (!std::isfinite(J)) throw ConfigError("lattice: J must be finite");
  if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("lattice: nu must lie in (0, 1]");
  const int n = particle_count();
  if (n < 1 || n > L) {
    std::ostringstream os;
    os << "lattice: N = round(nu*L) = " << n << " outside [1, " << L << "]";
    throw ConfigError(os.str());
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("lattice: gamma must be >= 0");
  std::set<int> seen;
  for (int j : monitored_sites) {
    if (j < 0 || j >= L)
      throw ConfigError("lattice: monitored site " + std::to_string(j) + " out of range");
    if (!seen.insert(j).second)
      throw ConfigError("lattice: duplicate monitored site " + std::to_string(j));
  }
}

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::hopping: return "hopping";
    case OperatorKind::non_hermitian_monitored: return "non_hermitian_monitored";
    case OperatorKind::real_potential: return "real_potential";
  }
  return "?";
}

SingleParticleOperator build_hopping(const LatticeSpec& spec) {
  if (spec.L < 2) throw ConfigError("build_hopping: L must be >= 2");
  const int L = spec.L;
  SingleParticleOperator op;
  op.kind = OperatorKind::hopping;
  op.matrix = CMatrix::Zero(L, L);
  for (int j = 0; j + 1 < L; ++j) {
    op.matrix(j, j + 1) = -spec.J;
    op.matrix(j + 1, j) = -spec.J;
  }
  // L == 2 with pbc would double the single bond; keep the chain bond only.
  if (spec.pbc && L > 2) {
    op.matrix(0, L - 1) = -spec.J;
    op.matrix(L - 1, 0) = -spec.J;
  }
  return op;
}

SingleParticleOperator build_monitored_hamiltonian(const SingleParticleOperator& h0,
                                                   const LatticeSpec& spec) {
  if (h0.kind != OperatorKind::hopping)
    throw ConfigError("build_monitored_hamiltonian: expected a hopping operator");
  if (h0.dim() != spec.L) throw ConfigError("build_monitored_hamiltonian: dimension mismatch");
  SingleParticleOperator op = h0;
  op.kind = OperatorKind::non_hermitian_monitored;
  for (int j : spec.monitored_sites) op.matrix(j, j) += cplx(0.0, -0.5 * spec.gamma);
  return op;
}

SingleParticleOperator build_real_potential(const SingleParticleOperator& h0, int j0, double gamma) {
  if (j0 < 0 || j0 >= h0.dim()) throw ConfigError("build_real_potential: site out of range");
  SingleParticleOperator op = h0;
  op.kind = OperatorKind::real_potential;
  op.matrix(j0, j0) += 0.5 * gamma;
  return op;
}

std::vector<int> fermi_sea_momenta(const LatticeSpec& spec) {
  const int L = spec.L;
  std::vector<int> order;
  std::vector<bool> used(L, false);
  order.reserve(L);
  auto push = [&](int m) {
    const int r = ((m % L) + L) % L;
    if (!used[r]) {
      used[r] = true;
      order.push_back(m);
    }
  };
  push(0);
  for (int a = 1; static_cast<int>(order.size()) < L; ++a) {
    push(a);
    push(-a);
  }
  const double two_pi_over_L = 2.0 * std::numbers::pi / L;
  auto band = [&](int m) { return -2.0 * spec.J * std::cos(two_pi_over_L * m); };
  // Compare with a tolerance so that +k and -k stay tied despite rounding.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return band(a) < band(b) - 1e-12; });
  return order;
}

bool fermi_level_open_shell(const LatticeSpec& spec) {
  const int n = spec.particle_count();
  if (n >= spec.L) return false;
  const auto order = fermi_sea_momenta(spec);
  const double two_pi_over_L = 2.0 * std::numbers::pi / spec.L;
  const double e_last = -2.0 * spec.J * std::cos(two_pi_over_L * order[n - 1]);
  const double e_next = -2.0 * spec.J * std::cos(two_pi_over_L * order[n]);
  return std::abs(e_last - e_next) < 1e-12;
}

GaussianState fermi_sea(const LatticeSpec& spec) {
  spec.validate();
  if (!spec.pbc) throw ConfigError("fermi_sea: plane-wave orbitals require periodic boundaries");
  const int L = spec.L;
  const int n = spec.particle_count();
  if (fermi_level_open_shell(spec)) {
    std::ostringstream os;
    os << "fermi_sea: open shell at L=" << L << ", N=" << n
       << "; filling degenerate momenta in order 0, +2pi/L, -2pi/L, ...";
    log::warn(os.str());
  }
  const auto order = fermi_sea_momenta(spec);
  CMatrix U(L, n);
  const double norm = 1.0 / std::sqrt(static_cast<double>(L));
  for (int c = 0; c < n; ++c) {
    const double k = 2.0 * std::numbers::pi * order[c] / L;
    for (int j = 0; j < L; ++j) U(j, c) = norm * std::polar(1.0, k * j);
  }
  return GaussianState(std::move(U));
}

std::vector<int> evenly_spaced_sites(int L, int n) {
  if (n < 1 || n > L) throw ConfigError("evenly_spaced_sites: need 1 <= n <= L");
  std::vector<int> sites(n);
  for (int k = 0; k < n; ++k) sites[k] = static_cast<int>((static_cast<long long>(k) * L) / n);
  return sites;
}

}  // namespace mchain
