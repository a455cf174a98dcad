#pragma once

#include <stdexcept>
#include <string>

namespace seqtest {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An input object violates its invariants (non-Hermitian matrix, bad POVM...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Mismatched or non-square shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Solver non-convergence or any other numerical failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A configured compute budget (block length, copy number) was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// More than the tolerated fraction of simulated trials hit the step cap.
class SaturationError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

}  // namespace seqtest
