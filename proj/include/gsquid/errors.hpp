#pragma once

#include <stdexcept>
#include <string>

namespace gsquid {

/// Bad user input: malformed config, invalid parameters, unreadable files.
/// The CLI maps this to exit status 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver could not produce a result (singular system, no convergence).
/// The CLI maps this to exit status 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public NumericalError {
 public:
  SingularSystemError(std::string equation_set, const std::string& detail)
      : NumericalError("singular network system (" + equation_set + "): " + detail),
        equation_set_(std::move(equation_set)) {}

  const std::string& equation_set() const { return equation_set_; }

 private:
  std::string equation_set_;
};

class NonConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace gsquid
