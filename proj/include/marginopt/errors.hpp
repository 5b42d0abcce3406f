#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marginopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch (non-square input, incompatible dimensions, bad lengths).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Matrix claimed symmetric fails the entrywise symmetry test.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Iterative eigensolver exhausted its sweep budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long iterations,
                   std::size_t window_lo, std::size_t window_hi)
      : Error(what),
        iterations(iterations),
        window_lo(window_lo),
        window_hi(window_hi) {}

  long iterations;
  std::size_t window_lo;  // index range of the deflation window that stalled
  std::size_t window_hi;
};

/// Linear solve hit a pivot below the singularity threshold.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, std::size_t pivot_index)
      : Error(what), pivot_index(pivot_index) {}

  std::size_t pivot_index;
};

/// The resolvent (lambda*S - mu*I) is too ill-conditioned to trust.
class ResolventError : public Error {
 public:
  ResolventError(const std::string& what, double condition)
      : Error(what), condition(condition) {}

  double condition;
};

/// Input data failed validation; carries the offending cell when known.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what, long row = -1,
                           long column = -1)
      : Error(what), row(row), column(column) {}

  long row;     // 1-based data row, -1 when not applicable
  long column;  // 1-based column, -1 when not applicable
};

/// Too few samples to estimate the requested statistics.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Requested problem size exceeds a hard enumeration cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

/// The objective is identically zero and has no preferred direction.
class DegenerateObjectiveError : public Error {
 public:
  using Error::Error;
};

/// No record qualifies for a ranking (e.g. every portfolio has zero risk).
class NoRankingError : public Error {
 public:
  using Error::Error;
};

}  // namespace marginopt
