#pragma once

#include <stdexcept>
#include <string>

namespace divgrad {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid distribution or operation parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An input lies outside the domain where an object is defined
/// (energy outside (0, 4κ), Im z = 0 for a resolvent, violated hypotheses).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A realization window does not cover the indices an operation needs.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// An iterative numerical method failed to meet its contract.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A size limit (eigendecomposition cap, quadrature budget) was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace divgrad
