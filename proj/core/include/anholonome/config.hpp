#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anholonome/integrator.hpp"
#include "anholonome/zoo.hpp"

namespace anholonome {

/// One simulate/reduce run. JSON form:
///
///   {
///     "system": "paper-particle",
///     "parameters": {"m": 1.0},
///     "initial": {"coords": {"x": 0.5}, "velocities": {"x": 1.0, "y": 0.0}},
///     "h": 0.001, "T": 5, "method": "rk4",
///     "out": "run.csv",
///     "routh": false, "mu": [2.0],
///     "crosscheck": false
///   }
///
/// Every key is optional except "system"; unknown keys are rejected.
/// Coordinates and velocities not given keep the system's default state.
struct RunConfig {
  std::string system;
  ParameterMap parameters;
  std::map<std::string, double> coords;
  std::map<std::string, double> velocities;
  double h = 1e-3;
  double t_final = 5.0;
  Method method = Method::rk4;
  std::string out;  // empty: standard output
  bool routh = false;
  std::optional<std::vector<double>> mu;
  bool crosscheck = false;
};

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::string& path);

/// Checks step, horizon and that a system name is present (ConfigError).
void validate(const RunConfig& cfg);

/// Default state of `built` overridden by the configured coordinates and
/// velocities. Labels the system does not have raise ConfigError.
CState initial_state(const BuiltSystem& built, const RunConfig& cfg);

}  // namespace anholonome
