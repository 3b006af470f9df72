#pragma once

#include <stdexcept>
#include <string>

namespace semimarkov {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A model, grid or configuration violates its declared invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver precondition on the model structure does not hold
/// (e.g. self-jumps in a forward solve, wrong holding-law family).
class HypothesisError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical breakdown: singular systems, non-finite inversion results.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semimarkov
