#pragma once

#include <stdexcept>
#include <string>

namespace huntkit {

// x outside the domain of a pointwise function (e.g. density at x <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed input structure: overlapping pieces, empty intervals, bad JSON shape.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An integral that should be finite could not be shown to converge.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace huntkit
