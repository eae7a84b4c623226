#pragma once

#include <stdexcept>
#include <string>

namespace nodallab {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Domain construction or serialization problem (bad shape, empty mask, ...).
struct InvalidDomain : Error {
  using Error::Error;
};

/// An iterative solver exhausted its iteration budget before reaching
/// tolerance.  Never swallowed: callers surface this as a numerical failure.
struct NonConvergence : Error {
  using Error::Error;
};

/// The requested construction needs a finer grid than the one supplied.
struct ResolutionTooCoarse : Error {
  using Error::Error;
};

/// An operation-specific precondition does not hold for the given inputs.
struct PreconditionViolation : Error {
  using Error::Error;
};

/// The operation is only defined for inputs this call does not provide
/// (e.g. a probe ball that misses the region of interest).
struct NotApplicable : Error {
  using Error::Error;
};

/// A vector that must carry at least one strictly signed entry is all zero.
struct EmptyDecomposition : Error {
  using Error::Error;
};

}  // namespace nodallab
