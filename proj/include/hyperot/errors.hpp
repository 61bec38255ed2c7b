#pragma once

#include <stdexcept>
#include <string>

namespace hyperot {

/// Invalid parameter or configuration value. `field` names the offending input.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical failure inside the transport solver.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long step = -1, double residual = -1.0)
      : std::runtime_error(what), step_(step), residual_(residual) {}

  long step() const noexcept { return step_; }
  double residual() const noexcept { return residual_; }

 private:
  long step_;
  double residual_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyperot
