#pragma once

#include <stdexcept>
#include <string>

#include "randskel/types.hpp"

namespace randskel {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
public:
  using Error::Error;
};

class DimensionError : public ParameterError {
public:
  using ParameterError::ParameterError;
};

/// Malformed input file; `line()` is 1-based, 0 when not tied to a line.
class FormatError : public Error {
public:
  FormatError(const std::string& what, long line);
  long line() const noexcept { return line_; }

private:
  long line_;
};

/// Base for failures that stem from the numbers rather than the arguments.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A factorization or sketch turned out (numerically) rank deficient.
/// `stage()` names the pipeline stage, `step()` the 1-based elimination
/// step where it was detected (0 when not applicable).
class RankDeficiencyError : public NumericalError {
public:
  RankDeficiencyError(std::string stage, Index step, const std::string& detail);
  const std::string& stage() const noexcept { return stage_; }
  Index step() const noexcept { return step_; }

private:
  std::string stage_;
  Index step_;
};

class SingularMatrixError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Non-finite values appeared (overflow/underflow in unstable recurrences).
class InstabilityError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// A dense reference computation was requested beyond the configured size.
class BudgetError : public Error {
public:
  using Error::Error;
};

} // namespace randskel
