#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modalpf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input documents (model JSON, CSV) or invalid arguments.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Mathematical degeneracies. The CLI maps these to exit code 2.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Repeated eigenvalue (first-order resonance).
class StrongResonanceError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

/// Mode shape nearly orthogonal to its mode composition (|cos δ| ≈ 0).
class DegenerateModeError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

class EigenSolverError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

/// A supplied vector is not a multiple of the reference eigenvector.
class NotAnEigenvectorError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

/// A combination component that only exists as a resonant (secular) term.
class ResonantComponentError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

/// Snapshot matrix without full row rank, or an operator fit that misses
/// held-out snapshots.
class RankDeficientError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

/// Koopman eigenvalues that cannot be paired with model modes.
class ModeMatchError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

class EstimationError : public DegeneracyError {
 public:
  using DegeneracyError::DegeneracyError;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t last_valid)
      : Error(what), last_valid_index(last_valid) {}
  std::size_t last_valid_index;
};

}  // namespace modalpf
