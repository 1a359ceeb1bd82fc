#pragma once

#include <stdexcept>
#include <string>

namespace hamsys {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: spec invariants, config values, file/grid mismatches.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SingularAngleError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class GridMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// An iterative method ran out of budget; carries the last residual.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The search collapsed onto the trivial solution.
class NoSolutionError : public NonConvergenceError {
 public:
  NoSolutionError(const std::string& what, double residual) : NonConvergenceError(what, residual) {}
};

class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

class UndefinedEigenproblemError : public Error {
 public:
  using Error::Error;
};

// A hard post-condition failed on a computed object.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace hamsys
