#pragma once

#include <stdexcept>
#include <string>

namespace bandalloc {

// Invalid scenario or slot parameters, mixed input modes, schema violations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands whose shapes do not agree (rate matrix vs. assignment, policy vs. scenario).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A request the analytic machinery deliberately does not cover
// (e.g. fixed allocation with fewer bands than users).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Birkhoff decomposition found no perfect matching on the remaining support.
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bandalloc
