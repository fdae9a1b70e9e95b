#pragma once

#include <stdexcept>
#include <string>

namespace gpe {

/// Invalid configuration or incompatible problem setup.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf appeared while evaluating the energy or its gradient.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The line search exhausted its backtracking budget.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpe
