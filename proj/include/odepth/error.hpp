#pragma once

#include <stdexcept>
#include <string>

namespace odepth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidLetter : public Error {
 public:
  using Error::Error;
};

class RankMismatch : public Error {
 public:
  using Error::Error;
};

class ContextMismatch : public Error {
 public:
  using Error::Error;
};

/// Input outside the operation's domain (wrong constant term, non-homogeneous
/// argument, element not in a span, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// Numeric failures.
class PoleProximity : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class EndpointMismatch : public Error {
 public:
  using Error::Error;
};

class NoReturn : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace odepth
