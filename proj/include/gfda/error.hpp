#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gfda {

/// Bad input: wrong shapes, violated preconditions, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The inputs are well formed but describe a geometry the construction
/// cannot handle (overlapping subspaces, an empty difference subspace).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity is undefined for the given direction (zero denominator,
/// zero projection under normalization).
class UndefinedDirectionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The method's structural precondition does not hold for this data.
class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal findings attached to results.
using Diagnostics = std::vector<std::string>;

}  // namespace gfda
