#pragma once

#include <stdexcept>
#include <string>

namespace stokeswave {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument (bad grid size, bad flag combination, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two grid functions of different sizes were combined.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Newton iteration failed to reach the requested residual.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual, int iterations)
      : Error(what), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

/// Inner linear solve stagnated with the Newton residual still large.
/// In speed continuation this signals proximity of a fold point.
class SingularJacobian : public Error {
 public:
  using Error::Error;
};

/// The linearized Babenko operator is singular on the even subspace.
class FoldPoint : public Error {
 public:
  using Error::Error;
};

/// Continuation could not advance even at the minimal step.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// A Fredholm condition that must vanish analytically came out large.
class SolvabilityViolation : public Error {
 public:
  SolvabilityViolation(const std::string& what, double defect)
      : Error(what), defect(defect) {}
  double defect;
};

/// A Krylov solve for a pencil block operator failed.
class IterationFailure : public Error {
 public:
  using Error::Error;
};

/// Arnoldi iteration broke down before producing a usable basis.
class ArnoldiBreakdown : public Error {
 public:
  using Error::Error;
};

/// Inner shift-and-invert solve failed to converge.
class InnerSolveFailure : public Error {
 public:
  using Error::Error;
};

/// |P''(c0)| below threshold; the normal form degenerates.
class DegenerateExtremum : public Error {
 public:
  using Error::Error;
};

/// Finite-difference stencil does not fit at this branch position.
class BoundaryPoint : public Error {
 public:
  using Error::Error;
};

// --- persistence errors ---

class StoreError : public Error {
 public:
  using Error::Error;
};

class IoError : public StoreError {
 public:
  using StoreError::StoreError;
};

/// File is corrupt: unparseable or the stored checksum disagrees.
class ChecksumMismatch : public StoreError {
 public:
  using StoreError::StoreError;
};

class VersionUnsupported : public StoreError {
 public:
  using StoreError::StoreError;
};

/// A loaded object would violate its type invariants.
class InvariantViolation : public StoreError {
 public:
  using StoreError::StoreError;
};

/// Malformed CSV/JSON content; carries a 1-based line number when known.
class ParseError : public StoreError {
 public:
  ParseError(const std::string& what, long line = -1)
      : StoreError(line >= 0 ? what + " (line " + std::to_string(line) + ")"
                             : what),
        line(line) {}
  long line;
};

class MonotonicityViolation : public StoreError {
 public:
  using StoreError::StoreError;
};

}  // namespace stokeswave
