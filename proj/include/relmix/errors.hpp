#pragma once

#include <stdexcept>
#include <string>

namespace relmix {

/// Malformed or inconsistent caller input (dimension mismatch, bad config).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical object failed validation (non-faithful state, map that is
/// not an automorphism, subalgebra not invariant, ...).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

/// Operation that is only defined for tracial states was given a non-tracial one.
class NotTracialError : public InputError {
 public:
  using InputError::InputError;
};

/// An identity that must hold by construction was violated beyond tolerance.
/// Signals a numerical breakdown or a bug, never bad input.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace relmix
