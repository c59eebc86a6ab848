#pragma once

#include <stdexcept>
#include <string>

namespace fairbandit {

// Caller violated a precondition (bad index, bad parameter, incompatible config).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exact enumeration would exceed its configured cap; use the Monte Carlo estimators instead.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A query hit a state where the value is undefined (e.g. a pairwise rate with no duels).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace fairbandit
