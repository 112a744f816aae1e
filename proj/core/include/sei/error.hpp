#pragma once

#include <stdexcept>
#include <string>

namespace sei {

/// Base of every error raised by the library. CLI maps `ValidationError`
/// (and subclasses) to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
   public:
    using Error::Error;
};

/// Incompatible extents, ranks or element counts.
class DimensionError : public ValidationError {
   public:
    using ValidationError::ValidationError;
};

/// A theorem hypothesis does not hold for the supplied filters.
class HypothesisError : public ValidationError {
   public:
    using ValidationError::ValidationError;
};

/// Non-finite values or other failures discovered while computing.
class NumericalError : public Error {
   public:
    using Error::Error;
};

class IoError : public Error {
   public:
    using Error::Error;
};

}  // namespace sei
