#include "anholonome/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "anholonome/errors.hpp"

namespace anholonome {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

std::map<std::string, double> number_map(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be an object of numbers");
  std::map<std::string, double> out;
  for (const auto& item : j.items()) out[item.key()] = number(item.value(), what + "." + item.key());
  return out;
}

bool boolean(const json& j, const std::string& what) {
  if (!j.is_boolean()) throw ConfigError(what + " must be true or false");
  return j.get<bool>();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  reject_unknown(doc, {"system", "parameters", "initial", "h", "T", "method", "out", "routh", "mu", "crosscheck"},
                 "scenario");

  RunConfig cfg;
  if (doc.contains("system")) {
    if (!doc["system"].is_string()) throw ConfigError("system must be a string");
    cfg.system = doc["system"].get<std::string>();
  }
  if (doc.contains("parameters")) cfg.parameters = number_map(doc["parameters"], "parameters");
  if (doc.contains("initial")) {
    const json& init = doc["initial"];
    if (!init.is_object()) throw ConfigError("initial must be an object");
    reject_unknown(init, {"coords", "velocities"}, "initial");
    if (init.contains("coords")) cfg.coords = number_map(init["coords"], "initial.coords");
    if (init.contains("velocities")) cfg.velocities = number_map(init["velocities"], "initial.velocities");
  }
  if (doc.contains("h")) cfg.h = number(doc["h"], "h");
  if (doc.contains("T")) cfg.t_final = number(doc["T"], "T");
  if (doc.contains("method")) {
    if (!doc["method"].is_string()) throw ConfigError("method must be a string");
    try {
      cfg.method = parse_method(doc["method"].get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("out must be a string");
    cfg.out = doc["out"].get<std::string>();
  }
  if (doc.contains("routh")) cfg.routh = boolean(doc["routh"], "routh");
  if (doc.contains("crosscheck")) cfg.crosscheck = boolean(doc["crosscheck"], "crosscheck");
  if (doc.contains("mu")) {
    const json& mu = doc["mu"];
    if (!mu.is_array()) throw ConfigError("mu must be an array of numbers");
    std::vector<double> values;
    for (const auto& v : mu) values.push_back(number(v, "mu"));
    cfg.mu = std::move(values);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.system.empty()) throw ConfigError("no system selected");
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw ConfigError("h must be positive and finite");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) throw ConfigError("T must be >= 0 and finite");
  if (cfg.mu) {
    for (double m : *cfg.mu)
      if (!std::isfinite(m)) throw ConfigError("mu must be finite");
  }
}

CState initial_state(const BuiltSystem& built, const RunConfig& cfg) {
  CState s = built.default_state;
  const auto& coords = built.system.coord_labels();
  for (const auto& [label, value] : cfg.coords) {
    const auto it = std::find(coords.begin(), coords.end(), label);
    if (it == coords.end()) {
      throw ConfigError("system '" + built.system.name() + "' has no coordinate '" + label + "'");
    }
    s.x.coords[it - coords.begin()] = value;
  }
  const auto labels = velocity_labels(built.system);
  for (const auto& [label, value] : cfg.velocities) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      throw ConfigError("system '" + built.system.name() + "' has no constrained velocity 'v" + label + "'");
    }
    s.v[it - labels.begin()] = value;
  }
  if (!s.x.coords.allFinite() || !s.v.allFinite()) throw ConfigError("initial state must be finite");
  return s;
}

}  // namespace anholonome
