#pragma once

#include <stdexcept>
#include <string>

namespace routepack {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or schema-violating input document. The message names the
/// offending JSON path.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that breaks a data-model invariant (dangling ids,
/// disconnected paths, volume counts).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ProjectionError : public Error {
 public:
  using Error::Error;
};

/// A route edge or stop could not be matched to the extracted skeleton.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive oracle refused an instance that is too large to enumerate.
class OracleSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace routepack
