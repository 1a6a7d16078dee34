#pragma once

#include <stdexcept>
#include <string>

namespace statlab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or malformed input (vertex id out of range, bad config key, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An operation needed the neighbourhood of a vertex that has not been generated yet.
class FrontierError : public Error {
 public:
  using Error::Error;
};

/// A sampler ran out of its work budget (bridge search, rejection sampling, ...).
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// A hard mathematical invariant was violated at runtime.
class AssertionError : public Error {
 public:
  using Error::Error;
};

/// The canopy sequence admits no stationary root.
class InadmissibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace statlab
