#pragma once

#include <stdexcept>
#include <string>

namespace sparse_align {

// Root of every error raised by the library. Callers that only care about
// "did it work" catch this; the CLI maps subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-domain input (non-finite costs, empty text, bad alpha...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A constrained construction was asked to run on costs with the wrong sign.
class ConstraintSignError : public InputError {
 public:
  using InputError::InputError;
};

// k outside the range permitted by the constraint variant.
class BoundError : public InputError {
 public:
  using InputError::InputError;
};

// Enumeration oracle asked to exceed its budget.
class SizeError : public InputError {
 public:
  using InputError::InputError;
};

// A transport plan could not be turned into a consistent assignment.
class RoundingError : public Error {
 public:
  using Error::Error;
};

// The input to birkhoff_decompose is not in the Birkhoff polytope.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

// Unreadable file content. The message names the offending line.
class ParseError : public InputError {
 public:
  using InputError::InputError;
};

// Structurally consistent lines whose dimensions disagree.
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace sparse_align
