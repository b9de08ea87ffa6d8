#pragma once

#include <stdexcept>
#include <string>

namespace hsfuse {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad weights, bad spec, bad flag value).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Shapes of operands do not agree, or a dimension is zero / indivisible.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A solver or transform produced a result that fails its own sanity check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Inverse DFT of a spectrum that is not conjugate-symmetric.
class SymmetryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Operator structure not supported by a fast path (callers fall back to CG).
class UnsupportedStructure : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class BadMagicError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedPayloadError : public IoError {
 public:
  using IoError::IoError;
};

class UnknownDtypeError : public IoError {
 public:
  using IoError::IoError;
};

class HeaderError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace hsfuse
