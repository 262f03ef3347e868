#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mchain/fock_oracle.hpp"
#include "mchain/gaussian_state.hpp"
#include "mchain/lattice.hpp"
#include "mchain/trajectory.hpp"

using namespace mchain;

namespace {

double binary_entropy(double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); }

CMatrix random_invertible(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix A(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) A(i, k) = {g(rng), g(rng)};
  return A + 3.0 * CMatrix::Identity(n, n);
}

GaussianState cyclic_shift(const GaussianState& s, int by) {
  const int L = s.sites();
  CMatrix U(L, s.particles());
  for (int j = 0; j < L; ++j) U.row(j) = s.orbitals().row((j + by) % L);
  return GaussianState(U);
}

LatticeSpec ring(int L) {
  LatticeSpec s;
  s.L = L;
  return s;
}

}  // namespace

TEST_CASE("entropy of simple states") {
  // One particle spread over two sites: ln 2 for either half.
  CMatrix U(2, 1);
  U << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(entanglement_entropy(GaussianState(U), 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  // Fermi sea at quarter filling: single-site entropy of <n> = 1/4.
  const auto fs = fermi_sea(ring(16));
  CHECK(entanglement_entropy(fs, 1) == doctest::Approx(0.5623351446188083).epsilon(1e-12));
  CHECK(std::abs(entanglement_entropy(fs, 1) - binary_entropy(0.25)) < 1e-12);

  // Product state: zero entropy up to the eigenvalue clamp.
  CMatrix P = CMatrix::Zero(6, 2);
  P(0, 0) = 1.0;
  P(3, 1) = 1.0;
  for (int ell = 1; ell < 6; ++ell) CHECK(entanglement_entropy(GaussianState(P), ell) < 1e-9);
}

TEST_CASE("entropy argument checks") {
  const auto fs = fermi_sea(ring(8));
  CHECK_THROWS_AS(entanglement_entropy(fs, 0), ConfigError);
  CHECK_THROWS_AS(entanglement_entropy(fs, 8), ConfigError);
  CorrelationBlock bad{0, 2, CMatrix::Zero(2, 2)};
  bad.matrix(0, 1) = 0.3;
  CHECK_THROWS_AS(block_entropy(bad), NumericalError);
}

TEST_CASE("correlation, entropy and energy agree with the Fock-space oracle") {
  std::mt19937_64 rng(11);
  for (auto [L, N] : {std::pair{4, 1}, {4, 2}, {6, 2}, {6, 3}, {8, 3}}) {
    const auto st = testing::random_state(L, N, rng);
    const CVector psi = fock::expand(st);
    CHECK(std::abs(fock::norm(psi) - 1.0) < 1e-12);
    CHECK((st.correlation() - fock::correlation(psi, L)).cwiseAbs().maxCoeff() < 1e-12);
    for (int ell = 1; ell < L; ++ell)
      CHECK(std::abs(entanglement_entropy(st, ell) - fock::entanglement_entropy(psi, L, ell)) < 1e-9);
    const auto h0 = build_hopping(ring(L));
    CHECK(std::abs(energy(st, h0) - fock::expectation(h0, psi)) < 1e-12);
    const auto hv = build_real_potential(h0, 1, 0.7);
    CHECK(std::abs(expectation(st, hv) - fock::expectation(hv, psi)) < 1e-12);
    for (int j = 0; j < L; ++j) CHECK(std::abs(occupation(st, j) - fock::occupation(psi, j)) < 1e-12);
  }
}

TEST_CASE("entropy of an offset block equals the leading block of the shifted state") {
  std::mt19937_64 rng(5);
  const auto st = testing::random_state(8, 3, rng);
  for (int off : {1, 3, 6})
    for (int ell = 1; ell < 8; ++ell)
      CHECK(std::abs(entanglement_entropy(st, ell, off) -
                     fock::entanglement_entropy(fock::expand(cyclic_shift(st, off)), 8, ell)) < 1e-9);
}

TEST_CASE("pure-state entropy symmetry and bound") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 5; ++rep) {
    const auto st = testing::random_state(12, 4, rng);
    for (int ell = 1; ell < 12; ++ell) {
      const double s = entanglement_entropy(st, ell);
      CHECK(std::abs(s - entanglement_entropy(st, 12 - ell, ell)) < 1e-9);
      CHECK(s >= 0.0);
      CHECK(s <= std::min(ell, 12 - ell) * std::log(2.0) + 1e-12);
    }
  }
}

TEST_CASE("observables are invariant under orbital mixing") {
  std::mt19937_64 rng(3);
  const auto st = testing::random_state(10, 4, rng);
  const auto h0 = build_hopping(ring(10));

  // Non-unitary mixing followed by re-orthonormalization.
  GaussianState mixed(st.orbitals() * random_invertible(4, rng));
  CHECK(mixed.orthonormality_defect() > 1e-3);
  reorthonormalize(mixed);
  CHECK(mixed.orthonormality_defect() < 1e-13);
  CHECK((mixed.correlation() - st.correlation()).cwiseAbs().maxCoeff() < 1e-12);

  // Unitary gauge: same state.
  Eigen::HouseholderQR<CMatrix> qr(random_invertible(4, rng));
  const CMatrix V = qr.householderQ();
  const GaussianState gauged(st.orbitals() * V);
  CHECK((gauged.correlation() - st.correlation()).cwiseAbs().maxCoeff() < 1e-12);
  for (int ell = 1; ell < 10; ++ell)
    CHECK(std::abs(entanglement_entropy(gauged, ell) - entanglement_entropy(st, ell)) < 1e-12);
  CHECK(std::abs(energy(gauged, h0) - energy(st, h0)) < 1e-12);

  // Re-orthonormalizing an orthonormal state changes nothing observable.
  const auto again = reorthonormalized(st);
  CHECK((again.correlation() - st.correlation()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("degenerate orbitals are rejected") {
  CMatrix U = CMatrix::Zero(4, 2);
  U(0, 0) = 1.0;
  U(0, 1) = 1.0;
  GaussianState s(U);
  CHECK_THROWS_AS(reorthonormalize(s), DegenerateStateError);
}

TEST_CASE("number projection matches the Fock-space projector") {
  std::mt19937_64 rng(21);
  for (auto [L, N] : {std::pair{4, 2}, {6, 2}, {6, 3}, {7, 4}}) {
    const auto st = testing::random_state(L, N, rng);
    for (int site : {0, L / 2, L - 1})
      for (int outcome : {0, 1}) {
        GaussianState g = st;
        apply_number_projection(g, site, outcome);
        CHECK(g.particles() == N);
        CHECK(g.orthonormality_defect() < 1e-12);
        CHECK(std::abs(occupation(g, site) - outcome) < 1e-12);
        const CVector psi = fock::project(fock::expand(st), site, outcome);
        CHECK((g.correlation() - fock::correlation(psi, L)).cwiseAbs().maxCoeff() < 1e-11);
      }
  }
}

TEST_CASE("projection with zero Born weight is refused") {
  CMatrix U = CMatrix::Zero(4, 1);
  U(1, 0) = 1.0;
  GaussianState s(U);
  CHECK_THROWS_AS(apply_number_projection(s, 0, 1), ImpossibleOutcomeError);
  CHECK_THROWS_AS(apply_number_projection(s, 1, 0), ImpossibleOutcomeError);
  CHECK_THROWS_AS(apply_number_projection(s, 9, 1), ConfigError);
}

TEST_CASE("jump projection never raises the entropy of a block containing the site") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    auto st = testing::random_state(10, 3, rng);
    const double before = entanglement_entropy(st, 4);
    apply_number_projection(st, 0, 1);
    CHECK(entanglement_entropy(st, 4) <= before + 1e-10);
  }
}
