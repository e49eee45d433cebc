#pragma once

#include <stdexcept>
#include <string>

namespace hb {

// Argument outside the physical domain, e.g. r <= 2M.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid configuration or unusable input parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Result not representable in double precision.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Iteration or quadrature failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A run reached the grid boundary and was rejected.
class RejectedRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hb
