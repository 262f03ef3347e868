#pragma once

#include <cstdint>

#include "mchain/types.hpp"

namespace mchain {

class GaussianState;
struct SingleParticleOperator;

// Exact many-body reference for short chains.
//
// Basis state b is a bitmask (bit j = occupation of site j); the canonical
// state is c+_{j1} c+_{j2} ... c+_{jN}|0> with j1 < j2 < ... < jN, and
// c+_j picks up (-1)^(number of occupied sites below j).  Nothing in here
// goes through correlation matrices.
namespace fock {

inline constexpr int kMaxSites = 12;

// Amplitudes of a Slater determinant over all 2^L patterns: the amplitude of
// (j1 < ... < jN) is det of rows {j1..jN} of U.
CVector expand(const GaussianState& state);

// sum_ij h_ij c+_i c_j |psi>
CVector apply_quadratic(const SingleParticleOperator& op, const CVector& psi);

// exp(-i H t)|psi> for the second-quantized H of `op`, by a Taylor series on
// substeps.  Not renormalized.
CVector evolve(const SingleParticleOperator& op, const CVector& psi, double t);

// n_site|psi> (outcome 1) or (1 - n_site)|psi> (outcome 0), normalized.
CVector project(const CVector& psi, int site, int outcome);

double norm(const CVector& psi);
CVector normalized(const CVector& psi);

double occupation(const CVector& psi, int site);

// C_ij = <c+_j c_i>, same convention as GaussianState::correlation().
CMatrix correlation(const CVector& psi, int L);

// <psi|H|psi> / <psi|psi>, real part.
double expectation(const SingleParticleOperator& op, const CVector& psi);

// Entropy of the leading block of sites [0, ell), from the reduced density matrix.
double entanglement_entropy(const CVector& psi, int L, int ell);

int sites_of(const CVector& psi);

}  // namespace fock
}  // namespace mchain
