#pragma once

#include <stdexcept>
#include <string>

namespace jointspec {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shape, dimension mismatch, schema violation.
class InputError : public Error {
public:
  using Error::Error;
};

/// An iterative method ran out of budget, or a certificate could not be established.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A decision sits inside its tolerance band; the caller may retry with another tolerance.
class InconclusiveError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// JSON document does not match the expected schema. `where` is a JSON-pointer-like path.
class SchemaError : public InputError {
public:
  SchemaError(std::string where, const std::string& what)
      : InputError(where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

}  // namespace jointspec
