#pragma once

#include <stdexcept>
#include <string>

namespace cartanflow {

/// Caller broke a precondition that is independent of the numerical data
/// (mismatched dimensions, wrong vector length, unsupported class).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data does not satisfy a defining relation (not Hermitian, not in g0,
/// parameters out of range).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A radial point sits on (or within tolerance of) a chamber wall where the
/// requested map is singular.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal cross-check failed (root fit residual, non-constant density
/// ratio, quadrature not converged).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation not available for the requested parameters.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cartanflow
