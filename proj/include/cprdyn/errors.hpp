#pragma once

#include <stdexcept>
#include <string>

namespace cprdyn {

// Parameter set or configuration rejected before any computation runs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A function was evaluated outside the region where it is defined
// (Moran denominator <= 0, Jacobian across a discontinuity, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Integration produced a non-finite state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cprdyn
