#pragma once

#include <stdexcept>
#include <string>

namespace potts {

/// Operands have incompatible shapes (dimension or side length).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An argument lies outside the domain an operation is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A continuous field produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive oracle was asked for a problem size it will not attempt.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sampled moment generating function diverges; the data is not sub-Gaussian.
class NotSubGaussianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace potts
