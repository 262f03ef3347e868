#include "mchain/fock_oracle.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "mchain/gaussian_state.hpp"
#include "mchain/lattice.hpp"

namespace mchain::fock {
namespace {

void check_size(int L) {
  if (L < 1 || L > kMaxSites) {
    std::ostringstream os;
    os << "fock oracle: L = " << L << " outside [1, " << kMaxSites << "]";
    throw ConfigError(os.str());
  }
}

int parity_below(std::uint32_t b, int j) {
  return std::popcount(b & ((1u << j) - 1u)) & 1;
}

}  // namespace

int sites_of(const CVector& psi) {
  const auto dim = static_cast<std::uint64_t>(psi.size());
  if (dim == 0 || !std::has_single_bit(dim)) throw ConfigError("fock oracle: size is not 2^L");
  return std::countr_zero(dim);
}

CVector expand(const GaussianState& state) {
  const int L = state.sites();
  const int n = state.particles();
  check_size(L);
  const CMatrix& U = state.orbitals();
  CVector psi = CVector::Zero(Eigen::Index{1} << L);
  CMatrix minor(n, n);
  for (std::uint32_t b = 0; b < (1u << L); ++b) {
    if (std::popcount(b) != n) continue;
    int r = 0;
    for (int j = 0; j < L; ++j)
      if (b >> j & 1u) minor.row(r++) = U.row(j);
    psi(b) = n == 0 ? cplx(1.0) : minor.determinant();
  }
  return psi;
}

CVector apply_quadratic(const SingleParticleOperator& op, const CVector& psi) {
  const int L = sites_of(psi);
  check_size(L);
  if (op.dim() != L) throw ConfigError("fock oracle: operator dimension mismatch");
  CVector out = CVector::Zero(psi.size());
  for (std::uint32_t b = 0; b < (1u << L); ++b) {
    const cplx a = psi(b);
    if (a == cplx(0.0)) continue;
    for (int j = 0; j < L; ++j) {
      if (!(b >> j & 1u)) continue;
      // c_j
      const std::uint32_t b1 = b ^ (1u << j);
      const int s1 = parity_below(b, j);
      for (int i = 0; i < L; ++i) {
        const cplx h = op.matrix(i, j);
        if (h == cplx(0.0)) continue;
        if (b1 >> i & 1u) continue;
        // c+_i
        const int s2 = parity_below(b1, i);
        const std::uint32_t b2 = b1 | (1u << i);
        out(b2) += ((s1 ^ s2) ? -1.0 : 1.0) * h * a;
      }
    }
  }
  return out;
}

CVector evolve(const SingleParticleOperator& op, const CVector& psi, double t) {
  const int L = sites_of(psi);
  // Row-sum bound of the single-particle matrix times N bounds the many-body norm.
  double bound = 0.0;
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    bound = std::max(bound, op.matrix.row(i).cwiseAbs().sum());
  bound *= L;
  const int substeps = std::max(1, static_cast<int>(std::ceil(std::abs(t) * bound / 0.5)));
  const double h = t / substeps;
  CVector v = psi;
  for (int s = 0; s < substeps; ++s) {
    CVector term = v;
    CVector sum = v;
    for (int k = 1; k < 60; ++k) {
      term = apply_quadratic(op, term) * (cplx(0.0, -h) / static_cast<double>(k));
      sum += term;
      if (term.norm() < 1e-18 * sum.norm()) break;
    }
    v = std::move(sum);
  }
  return v;
}

double norm(const CVector& psi) { return psi.norm(); }

CVector normalized(const CVector& psi) {
  const double nrm = psi.norm();
  if (!(nrm > 0.0)) throw ImpossibleOutcomeError("fock oracle: zero vector");
  return psi / nrm;
}

CVector project(const CVector& psi, int site, int outcome) {
  const int L = sites_of(psi);
  if (site < 0 || site >= L) throw ConfigError("fock oracle: site out of range");
  CVector out = psi;
  for (std::uint32_t b = 0; b < (1u << L); ++b)
    if (static_cast<int>(b >> site & 1u) != outcome) out(b) = 0.0;
  return normalized(out);
}

double occupation(const CVector& psi, int site) {
  const int L = sites_of(psi);
  double n = 0.0;
  for (std::uint32_t b = 0; b < (1u << L); ++b)
    if (b >> site & 1u) n += std::norm(psi(b));
  return n / psi.squaredNorm();
}

CMatrix correlation(const CVector& psi, int L) {
  if (sites_of(psi) != L) throw ConfigError("fock oracle: L mismatch");
  CMatrix c(L, L);
  const double nrm2 = psi.squaredNorm();
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      // <c+_j c_i> = <psi| c+_j c_i |psi>
      SingleParticleOperator e;
      e.kind = OperatorKind::real_potential;
      e.matrix = CMatrix::Zero(L, L);
      e.matrix(j, i) = 1.0;
      c(i, j) = psi.dot(apply_quadratic(e, psi)) / nrm2;
    }
  }
  return c;
}

double expectation(const SingleParticleOperator& op, const CVector& psi) {
  return (psi.dot(apply_quadratic(op, psi)) / psi.squaredNorm()).real();
}

double entanglement_entropy(const CVector& psi, int L, int ell) {
  if (sites_of(psi) != L) throw ConfigError("fock oracle: L mismatch");
  if (ell < 1 || ell >= L) throw ConfigError("fock oracle: need 1 <= ell < L");
  const Eigen::Index dA = Eigen::Index{1} << ell;
  const Eigen::Index dB = Eigen::Index{1} << (L - ell);
  // Leading sites sit in the low bits, so psi(a + dA*b) reshapes column-major.
  CMatrix m = Eigen::Map<const CMatrix>(psi.data(), dA, dB) / psi.norm();
  CMatrix rho = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double p : es.eigenvalues())
    if (p > 1e-300) s -= p * std::log(p);
  return s;
}

}  // namespace mchain::fock
