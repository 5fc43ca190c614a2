#pragma once

#include <stdexcept>

namespace bellcert {

/// Input outside the domain of an operation (Q < 1, rs outside [1, Q], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Bellman point at which the critical parameter is undefined; resample.
class DegeneratePointError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A quadrature or factorization produced a non-finite or indefinite result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bellcert
