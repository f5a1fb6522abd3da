#pragma once

#include <stdexcept>
#include <string>

namespace ghzcav {

// Base of all library errors. The CLI maps the concrete subclasses onto
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed config, out-of-range parameters, mismatched shapes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// No calibration satisfies the requested margins.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::string binding)
      : Error(what), binding_(std::move(binding)) {}

  // Name of the constraint that could not be met, e.g. "spectator 3: pulse_detuning_ratio".
  const std::string& binding() const noexcept { return binding_; }

 private:
  std::string binding_;
};

// Propagation failed to converge or violated a resolution requirement.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ghzcav
