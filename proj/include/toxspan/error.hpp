#pragma once

#include <stdexcept>
#include <string>

namespace toxspan {

// Base for every error the library raises. The CLI maps the concrete type to
// an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad CSV, out-of-range offset, invalid UTF-8, missing file.
class DataError : public Error {
 public:
  using Error::Error;
};

// Bad caller-supplied arguments or configuration.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or weights during training.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace toxspan
