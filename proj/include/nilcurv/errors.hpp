#pragma once

#include <stdexcept>
#include <string>

namespace nilcurv {

/// Base class for every exception thrown by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or string (JSON structure, rational syntax, ...).
class ParseError : public Error {
public:
  using Error::Error;
};

/// Structurally valid input that violates a documented requirement
/// (asymmetric metric, bracket index out of range, non-skew cocycle op, ...).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Symmetric bilinear form with (numerically) vanishing determinant.
class DegenerateMetric : public Error {
public:
  using Error::Error;
};

/// Subspace on which the restricted form is singular, so no pseudo-orthonormal
/// basis exists.
class DegenerateSubspace : public Error {
public:
  using Error::Error;
};

/// Basis-change matrix that is not invertible.
class SingularTransform : public Error {
public:
  using Error::Error;
};

/// Lower central series stabilizes at a nonzero subalgebra.
class NotNilpotent : public Error {
public:
  using Error::Error;
};

/// Center of the algebra is degenerate for the ambient metric.
class DegenerateCenter : public Error {
public:
  using Error::Error;
};

/// Center is nondegenerate but the restricted metric is not positive definite.
class NonEuclideanCenter : public Error {
public:
  using Error::Error;
};

/// Candidate 2-cocycle fails the cocycle identity.
class NotACocycle : public Error {
public:
  using Error::Error;
};

/// Operation requires a specific nilpotency class the input does not have.
class WrongNilpotencyClass : public Error {
public:
  using Error::Error;
};

/// Derived ideal is degenerate, or lacks the required Lorentzian signature.
class DegenerateDerived : public Error {
public:
  using Error::Error;
};

/// Inputs fail a hypothesis of the matrix statement being checked.
class HypothesisViolated : public Error {
public:
  using Error::Error;
};

/// Exact-mode square root of a rational that is not a perfect square.
class InexactSqrt : public Error {
public:
  using Error::Error;
};

/// Matrix dimensions incompatible with the requested operation.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// Two operands that must share a size do not.
class SizeMismatch : public Error {
public:
  using Error::Error;
};

/// Family parameter that must be nonzero is zero.
class ZeroParameter : public Error {
public:
  using Error::Error;
};

/// Family parameter outside its documented domain.
class ParameterOutOfRange : public Error {
public:
  using Error::Error;
};

/// Supplied basis does not span the derived ideal.
class BasisDoesNotSpanDerived : public Error {
public:
  using Error::Error;
};

} // namespace nilcurv
