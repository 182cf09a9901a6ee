#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orank {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the operation (zero norm, bad mode, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a documented precondition (e.g. non-descent direction).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf produced where finite values are required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A rank-one component collapsed to (numerically) zero norm.
class DegenerateComponentError : public Error {
 public:
  DegenerateComponentError(std::size_t component, const std::string& what)
      : Error(what), component_(component) {}

  std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

/// Malformed input file or command-line value.
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace orank
