#ifndef OPFREE_ERRORS_HPP
#define OPFREE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opfree {

// Base class for all toolkit errors; CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A mathematical precondition failed (point outside the upper half-space,
// a map that is not completely positive, dimension mismatch, ...).
struct DomainError : Error {
  using Error::Error;
};

// Input document violates the problem schema. Carries the field path.
struct SchemaError : Error {
  explicit SchemaError(const std::string& path, const std::string& what)
      : Error("schema error at '" + path + "': " + what), field_path(path) {}
  std::string field_path;
};

// An iterative solve or a series evaluation could not be certified.
struct ConvergenceError : Error {
  using Error::Error;
};

// A lazily truncated free-product computation would read unreliable data.
struct TruncationError : Error {
  using Error::Error;
};

// Requested moment/cumulant degree exceeds what a law stores.
struct DegreeError : Error {
  using Error::Error;
};

// A constructed isomorphism failed its own validation.
struct ConstructionError : Error {
  using Error::Error;
};

// A linear map that must be inverted is singular.
struct SingularMapError : Error {
  using Error::Error;
};

}  // namespace opfree

#endif
