#pragma once

#include <stdexcept>
#include <string>

namespace swsim {

// Bad input: malformed config, violated precondition, dimension mismatch.
// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A well-formed request that could not be carried out (integrator event cap,
// schedule horizon exhausted, I/O failure). The CLI maps this to exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace swsim
