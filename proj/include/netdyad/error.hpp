#pragma once

#include <stdexcept>
#include <string>

namespace netdyad {

// Raised when an input violates a documented precondition (malformed graph,
// misaligned data, out-of-range parameter).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine cannot produce a meaningful result
// (rank-deficient design, indefinite variance without repair).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netdyad
