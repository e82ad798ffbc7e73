#ifndef LOCSVM_ERRORS_HPP
#define LOCSVM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace locsvm {

/// Base class for all library errors.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values (bad loss parameters, lambda <= 0, ...).
struct config_error : error {
  using error::error;
};

/// Arguments outside an operation's domain (dimension mismatch, bad labels).
struct domain_error : error {
  using error::error;
};

/// Operation is not defined for the given inputs (e.g. a Lipschitz constant
/// of the least-squares loss).
struct unsupported_error : error {
  using error::error;
};

/// A regionalization cannot be fitted under the requested constraints.
struct fit_error : error {
  using error::error;
};

/// Linear algebra failed beyond the accepted tolerance.
struct numerical_error : error {
  using error::error;
};

/// File reading/writing problems; message carries the offending location.
struct io_error : error {
  using error::error;
};

}  // namespace locsvm

#endif  // LOCSVM_ERRORS_HPP
