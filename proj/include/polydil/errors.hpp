#pragma once

#include <stdexcept>
#include <string>

namespace polydil {

/// Base of every error thrown by the library. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible matrix shapes or tuple sizes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A size or integer result would overflow a fixed-width representation.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent search or grid configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two systems that must share structure (D-tuple, split, corner) do not.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Malformed file or command-line value.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Lattice data referenced by the recurrence is missing.
class GapError : public Error {
 public:
  using Error::Error;
};

/// Numerical guard: a resolvent is too ill-conditioned to trust.
class SingularityError : public Error {
 public:
  SingularityError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace polydil
