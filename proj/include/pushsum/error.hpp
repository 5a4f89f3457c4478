#pragma once

#include <stdexcept>
#include <string>

namespace pushsum {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (bad dimensions, out-of-range
// node, invalid probability, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A message arrived that the counter mechanism cannot have produced, e.g. a
// running sum smaller than the one already recorded.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

// A guaranteed invariant did not hold (non-positive weight, ...).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Scenario file or override could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pushsum
