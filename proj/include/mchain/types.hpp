#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mchain {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Invalid user input: bad lattice, bad config, violated step guard.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Loss of numerical integrity (non-finite values, non-Hermitian blocks, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Orbital matrix lost full column rank.
class DegenerateStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A projection was requested onto an outcome with (numerically) zero weight.
class ImpossibleOutcomeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mchain
