#pragma once

#include <stdexcept>
#include <string>

namespace domcode {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration cap was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Conditioning on an event of zero probability.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the region where a construction is defined
// (e.g. a nonpositive independent-set polynomial).
class RegimeError : public Error {
 public:
  using Error::Error;
};

class HolleyViolation : public Error {
 public:
  using Error::Error;
};

// A site oracle could not produce an exact conditional.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Two computations that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace domcode
