#pragma once

#include <stdexcept>
#include <string>

namespace covcap {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operands have incompatible shapes.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A matrix required to be Hermitian fails the relative tolerance check.
class NotHermitian : public Error {
 public:
  using Error::Error;
};

// A matrix required to be positive semidefinite has an eigenvalue below
// the tolerated negative band.
class IndefiniteMatrix : public Error {
 public:
  using Error::Error;
};

// The iterative eigensolver or SVD did not converge.
class EigFailure : public Error {
 public:
  using Error::Error;
};

// A matrix required to be unitary is not, within tolerance.
class NonUnitary : public Error {
 public:
  using Error::Error;
};

// The randomized minimal-projection search failed repeatedly; a generic
// draw should succeed with probability one, so this signals numerical trouble.
class GenericityFailure : public Error {
 public:
  using Error::Error;
};

// The multiplicative closure of the requested unitaries exceeds the bound.
class ClosureBoundExceeded : public Error {
 public:
  using Error::Error;
};

// A reconstruction/reassembly residual exceeded its tolerance, indicating
// inconsistent inputs (e.g. a projection resolution not in the commutant).
class ResidualExceeded : public Error {
 public:
  using Error::Error;
};

// Malformed input document (JSON parse or schema violation).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A covariance specification violates its invariants.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace covcap
