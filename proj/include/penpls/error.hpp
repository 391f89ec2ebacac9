#pragma once

#include <stdexcept>
#include <string>

namespace penpls {

// Base of every error raised by the library. Callers that only care about
// "the fit failed" can catch this; the subclasses exist so the CLI can map
// failures onto exit codes and so tests can check the failure kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfiguration : public Error {
 public:
  using Error::Error;
};

class DegenerateVariable : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateResponse : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

class InvalidKernel : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace penpls
