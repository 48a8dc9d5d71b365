#pragma once

#include <stdexcept>
#include <string>

namespace ncbkw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};
struct NotHermitian : Error {
  using Error::Error;
};
struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct NotCompletelyPositive : Error {
  using Error::Error;
};
struct InvalidArgument : Error {
  using Error::Error;
};
struct InconsistentTargets : Error {
  using Error::Error;
};
struct NotGenerating : Error {
  using Error::Error;
};
struct ConditionsNotMet : Error {
  using Error::Error;
};
struct EmptyRepresentation : Error {
  using Error::Error;
};
// Raised by the JSON layer; the message names the offending path.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace ncbkw
