#pragma once

#include <stdexcept>
#include <string>

namespace qtalloc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contract violations on configuration mutation.
struct PixelNotEmpty : Error {
  using Error::Error;
};
struct DestinationNotEmpty : Error {
  using Error::Error;
};
struct LayerMismatch : Error {
  using Error::Error;
};
struct UnknownModule : Error {
  using Error::Error;
};
struct DepthExceeded : Error {
  using Error::Error;
};
struct PreconditionViolated : Error {
  using Error::Error;
};

// z-order comparison of nested pixels is undefined.
struct NestedPixels : Error {
  using Error::Error;
};

// Shape and request handling.
struct AspectRatioExceeded : Error {
  using Error::Error;
};
struct MalformedSequence : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct IoFailure : Error {
  using Error::Error;
};

// Oracle guards.
struct LimitsTooLarge : Error {
  using Error::Error;
};
struct SearchBudgetExceeded : Error {
  using Error::Error;
};

}  // namespace qtalloc
