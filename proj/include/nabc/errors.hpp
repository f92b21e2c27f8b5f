#pragma once

#include <stdexcept>
#include <string>

namespace nabc {

/// Raised when a caller hands in a value outside an operation's contract.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a mathematical function is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Surrogate fitting could not produce a positive-definite kernel system.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A backward-induction solve failed; the message names the stage.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nabc
