#pragma once

#include <stdexcept>
#include <string>

namespace conewave {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A generator or bump violates one of the moment/decay inequalities.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

// Objects that must share a grid (or a scheme convention) do not.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Truncation growth or an adaptive rule did not settle.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

// Window radicands went negative on too many samples.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace conewave
