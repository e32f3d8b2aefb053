#pragma once

#include <stdexcept>
#include <string>

namespace dda {

// Invalid configuration input (bad file, bad field, unknown kind).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A documented algorithm/operation precondition was violated.
struct PreconditionError : std::invalid_argument {
  explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: non-convergence, overflow horizon, non-finite values.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dda
