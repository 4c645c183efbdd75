#pragma once

#include <stdexcept>
#include <string>

namespace rmopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factorization or geometric operation hit a singular or degenerate case.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition (e.g. non-scalar cost output).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// The manifold does not implement the requested operation.
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// A cost or derivative evaluation produced non-finite values.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rmopt
