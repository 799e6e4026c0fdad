#ifndef AMOD_COMMON_HPP_
#define AMOD_COMMON_HPP_

#include <random>
#include <stdexcept>
#include <string>

namespace amod {

// Every stochastic component takes one of these explicitly; nothing draws
// from a global generator.
using Rng = std::mt19937_64;

// Malformed input or a violated invariant. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario/plan text that does not parse.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Shapes that do not line up (checkpoint vs scenario, action length, ...).
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Optimizer did not reach the requested accuracy. Exit code 3.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File system trouble. Exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace amod

#endif  // AMOD_COMMON_HPP_
