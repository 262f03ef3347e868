#include "mchain/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mchain/lattice.hpp"

namespace mchain {

GaussianState::GaussianState(CMatrix orbitals) : U_(std::move(orbitals)) {}

CMatrix GaussianState::correlation() const { return U_ * U_.adjoint(); }

double GaussianState::orthonormality_defect() const {
  const int n = particles();
  CMatrix g = U_.adjoint() * U_;
  g -= CMatrix::Identity(n, n);
  return n == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

CorrelationBlock correlation_block(const GaussianState& state, int ell, int offset) {
  const int L = state.sites();
  if (ell < 1 || ell > L) {
    std::ostringstream os;
    os << "correlation_block: ell = " << ell << " outside [1, " << L << "]";
    throw ConfigError(os.str());
  }
  const CMatrix& U = state.orbitals();
  CMatrix rows(ell, U.cols());
  for (int i = 0; i < ell; ++i) rows.row(i) = U.row(((offset + i) % L + L) % L);
  CorrelationBlock block;
  block.offset = offset;
  block.ell = ell;
  block.matrix = rows * rows.adjoint();
  return block;
}

double occupation(const GaussianState& state, int j) {
  if (j < 0 || j >= state.sites()) throw ConfigError("occupation: site out of range");
  const double n = state.orbitals().row(j).squaredNorm();
  return std::clamp(n, 0.0, 1.0);
}

RVector occupations(const GaussianState& state) {
  return state.orbitals().rowwise().squaredNorm();
}

double block_entropy(const CorrelationBlock& block) {
  const CMatrix& c = block.matrix;
  const double asym = (c - c.adjoint()).cwiseAbs().maxCoeff();
  if (!std::isfinite(asym) || asym > 1e-8) {
    std::ostringstream os;
    os << "entanglement_entropy: correlation block not Hermitian (defect " << asym << ")";
    throw NumericalError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(c, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("entanglement_entropy: eigensolver failed");
  double s = 0.0;
  for (double lambda : es.eigenvalues()) {
    const double p = std::clamp(lambda, kEntropyClamp, 1.0 - kEntropyClamp);
    s -= p * std::log(p) + (1.0 - p) * std::log1p(-p);
  }
  return s;
}

double entanglement_entropy(const GaussianState& state, int ell, int offset) {
  if (ell < 1 || ell >= state.sites())
    throw ConfigError("entanglement_entropy: need 1 <= ell < L, got " + std::to_string(ell));
  return block_entropy(correlation_block(state, ell, offset));
}

double expectation(const GaussianState& state, const SingleParticleOperator& op) {
  if (op.dim() != state.sites()) throw ConfigError("expectation: dimension mismatch");
  // Tr(h U U+) = Tr(U+ h U)
  const CMatrix& U = state.orbitals();
  return (U.adjoint() * op.matrix * U).trace().real();
}

double energy(const GaussianState& state, const SingleParticleOperator& h0) {
  if (h0.kind != OperatorKind::hopping) throw ConfigError("energy: expected the hopping operator");
  return expectation(state, h0);
}

void reorthonormalize(GaussianState& state) {
  CMatrix& U = state.orbitals();
  const Eigen::Index n = U.cols();
  if (n == 0) return;
  Eigen::HouseholderQR<CMatrix> qr(U);
  const auto& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double rk = std::abs(r(k, k));
    if (!(rk >= 1e-14)) {
      std::ostringstream os;
      os << "reorthonormalize: orbital " << k << " collapsed (|R_kk| = " << rk << ")";
      throw DegenerateStateError(os.str());
    }
  }
  U = qr.householderQ() * CMatrix::Identity(U.rows(), n);
}

GaussianState reorthonormalized(GaussianState state) {
  reorthonormalize(state);
  return state;
}

}  // namespace mchain
