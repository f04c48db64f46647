#pragma once

#include <stdexcept>
#include <string>

namespace eahm {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad input: malformed scenario files, parameters outside their domain,
// arguments violating a documented precondition.  Maps to process exit code 1.
class ConfigError : public Error {
public:
  using Error::Error;
};

// A parameter or argument outside its mathematical domain (negative rate,
// point outside the covariate support, ...).
class DomainError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

// Numerical machinery failed to deliver a trustworthy answer.  Maps to
// process exit code 2.
class NumericError : public Error {
public:
  using Error::Error;
};

// Adaptive quadrature exhausted its subdivision budget with the error
// estimate still above tolerance.
class QuadratureError : public NumericError {
public:
  using NumericError::NumericError;
};

// Root finding could not establish a sign change on the given interval.
class BracketError : public NumericError {
public:
  using NumericError::NumericError;
};

// A quantity left the representable range where a computation needed it
// (e.g. a hazard ratio where the survival has underflowed to zero).
class UnderflowError : public NumericError {
public:
  using NumericError::NumericError;
};

}  // namespace eahm
