#ifndef VCD_ERROR_HPP
#define VCD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace vcd {

// Malformed arguments: shape mismatch, non-finite entries, violated
// preconditions on sizes or ranges.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse, e.g. feeding a detector that has already reached a decision.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Subspaces that (numerically) intersect where a trivial intersection is
// required.
class DegenerateGeometryError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A closed-form expression is undefined for the given input (repeated
// eigenvalues in a bound denominator, for instance).
class SingularInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vcd

#endif  // VCD_ERROR_HPP
