#pragma once

#include <stdexcept>
#include <string>

namespace rotland {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates a documented precondition.
class InvalidParam : public Error {
 public:
  using Error::Error;
};

/// log_map called on a rotation whose angle is within 1e-6 of pi; the
/// principal axis is numerically ambiguous there and the caller must
/// decide on a fallback.
class AngleNearPi : public Error {
 public:
  using Error::Error;
};

/// A residual angle fell below theta_min while p < 2, where the l_p
/// derivatives blow up.
class NearZeroResidual : public Error {
 public:
  using Error::Error;
};

/// A vertex has (numerically) all-zero residual degree, so the
/// normalized-Laplacian bound is inapplicable.
class DegenerateDegree : public Error {
 public:
  using Error::Error;
};

/// min alpha_ij <= 0: residuals are too large for the isotropic bound.
class AlphaNonpositive : public Error {
 public:
  using Error::Error;
};

/// An eigendecomposition failed its residual check.
class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// A matrix is too close to singular for polar projection.
class DegenerateMatrix : public Error {
 public:
  using Error::Error;
};

/// A random generator exhausted its retry budget (e.g. could not
/// produce a connected graph).
class GenerationFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace rotland
