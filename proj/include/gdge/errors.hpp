#pragma once

#include <stdexcept>
#include <string>

namespace gdge {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quantity that should be finite and positive underflowed or overflowed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A series or search hit its configured cap before meeting its tolerance.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (files, command-line values).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace gdge
