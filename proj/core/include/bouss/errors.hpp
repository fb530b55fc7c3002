//
// bouss - boundary heat-flux control of Boussinesq flow
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <stdexcept>
#include <string>

namespace bouss {

/// A linear system in a time-stepping sweep could not be factored or solved.
class SolverError : public std::runtime_error {
public:
  SolverError(int step, std::string equation, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ", " + equation + ": " + what),
        step_(step),
        equation_(std::move(equation)) {}

  int step() const { return step_; }
  const std::string& equation() const { return equation_; }

private:
  int step_;
  std::string equation_;
};

/// Invalid configuration; `field` names the offending key path.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

private:
  std::string field_;
};

}  // namespace bouss
