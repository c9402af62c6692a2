#pragma once

#include <stdexcept>
#include <string>

namespace tullock {

/// Invalid inputs, broken type invariants, scenario/schema problems.
/// The CLI maps this family to exit code 1.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside a declared domain (distribution support, prize support).
struct DomainError : ValidationError {
  using ValidationError::ValidationError;
};

/// Numerical failures: non-convergence, missing bracket, consistency
/// violations. The CLI maps this family to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tullock
