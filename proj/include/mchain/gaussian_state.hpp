#pragma once

#include <vector>

#include "mchain/types.hpp"

namespace mchain {

struct SingleParticleOperator;

// Eigenvalues of a correlation block are clamped to [eps, 1 - eps] before
// the binary entropy is taken.
inline constexpr double kEntropyClamp = 1e-12;

// Slater determinant stored by its L x N orbital matrix U (rows = sites).
//
// Two-point function convention used throughout:
//   C_ij = sum_k U_ik conj(U_jk) = <c+_j c_i>.
class GaussianState {
 public:
  GaussianState() = default;
  explicit GaussianState(CMatrix orbitals);

  int sites() const { return static_cast<int>(U_.rows()); }
  int particles() const { return static_cast<int>(U_.cols()); }

  const CMatrix& orbitals() const { return U_; }
  CMatrix& orbitals() { return U_; }

  // Full L x L correlation matrix.
  CMatrix correlation() const;

  // max |U+U - I|
  double orthonormality_defect() const;

 private:
  CMatrix U_;
};

// C restricted to the contiguous sites offset, offset+1, ..., offset+ell-1 (mod L).
struct CorrelationBlock {
  int offset = 0;
  int ell = 0;
  CMatrix matrix;
};

CorrelationBlock correlation_block(const GaussianState& state, int ell, int offset = 0);

// <n_j>, clamped to [0, 1].
double occupation(const GaussianState& state, int j);

// All site occupations (unclamped diagonal of C).
RVector occupations(const GaussianState& state);

// Binary entropy sum over the spectrum of a correlation block, in nats.
double block_entropy(const CorrelationBlock& block);

// Von Neumann entropy of the region [offset, offset + ell), 1 <= ell < L.
double entanglement_entropy(const GaussianState& state, int ell, int offset = 0);

// Re Tr(h C) = sum_ij h_ij <c+_i c_j> for any single-particle operator.
double expectation(const GaussianState& state, const SingleParticleOperator& op);

// Free-fermion energy <H0>; requires a hopping operator.
double energy(const GaussianState& state, const SingleParticleOperator& h0);

// Replace U by the orthonormal factor of its thin QR decomposition.
// Throws DegenerateStateError if a column collapses below 1e-14.
void reorthonormalize(GaussianState& state);
GaussianState reorthonormalized(GaussianState state);

}  // namespace mchain
