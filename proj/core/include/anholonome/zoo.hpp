#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anholonome/hamel.hpp"
#include "anholonome/reduction.hpp"
#include "anholonome/routh.hpp"

namespace anholonome {

using ParameterMap = std::map<std::string, double>;

struct Parameter {
  std::string name;
  double default_value;
  std::string unit;
  std::string description;
  bool positive = true;  // reject values <= 0
};

struct BuiltSystem {
  ConstrainedSystem system;
  std::optional<InvariantFrameSplit> split;
  std::optional<HorizontalSymmetryModel> horizontal;
  CState default_state;
};

struct SystemSpec {
  std::string name;
  std::string description;
  std::vector<Parameter> parameters;
  std::function<BuiltSystem(const ParameterMap&)> builder;  // receives a complete, validated map
};

/// Every built-in system, in listing order.
const std::vector<SystemSpec>& zoo();

/// nullptr when unknown.
const SystemSpec* find_system(std::string_view name);

/// Comma-separated system names, for error messages.
std::string system_names();

/// Fills defaults, rejects unknown names and out-of-range values (ConfigError).
ParameterMap resolve_parameters(const SystemSpec& spec, const ParameterMap& overrides);

BuiltSystem build_system(const SystemSpec& spec, const ParameterMap& overrides = {});

/// Labels of the constrained quasi-velocities v^alpha, alpha < m.
std::vector<std::string> velocity_labels(const ConstrainedSystem& sys);

}  // namespace anholonome
