#pragma once

// Run configuration: a TOML-syntax config file parsed into validated
// settings. Unknown keys are rejected; defaults are filled in and echoed
// into reports.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cosserat/expression.hpp"
#include "cosserat/jets.hpp"
#include "cosserat/material.hpp"

namespace cosserat {

// Minimal TOML reader covering the config surface: [table] headers,
// key = value with strings, numbers, booleans, and (nested) arrays.
struct TomlValue {
  std::variant<std::string, double, bool, std::vector<TomlValue>> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<std::vector<TomlValue>>(data); }
  const std::string& str() const { return std::get<std::string>(data); }
  double num() const { return std::get<double>(data); }
  bool boolean() const { return std::get<bool>(data); }
  const std::vector<TomlValue>& array() const { return std::get<std::vector<TomlValue>>(data); }
};

// flat map keyed by "table.key"
std::map<std::string, TomlValue> parse_toml(const std::string& text);

struct MediumConfig {
  std::string name;                        // builtin name or plug-in identifier
  bool is_plugin = false;
  std::vector<std::string> implant_entries; // expression entries of A, row-major
};

struct RunConfig {
  BodyChart chart;
  MediumConfig medium;
  ToleranceConfig tolerances;
  SamplerConfig sampler;
  int grid = 5;
  std::optional<Vec> z0;
  std::vector<Vec> points; // explicit uniformity points, optional

  // homogeneity candidate (expressions), optional
  std::vector<std::string> candidate_kappa;
  std::vector<std::string> candidate_frame;

  // fields for the prolong command: expressions, or a CSV grid
  std::vector<std::string> prolong_p;
  std::vector<std::string> prolong_q;
  std::string prolong_csv;
  std::vector<int> prolong_nodes;

  // symmetry probe points; defaults to the chart centre
  std::vector<Vec> symmetry_points;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Builds the response function the config names; plug-ins are resolved
// through the registry populated by the C API.
ResponseFunction medium_from_config(const RunConfig& cfg);

// Plug-in registry (process-wide): name -> response function.
void register_plugin_response(const std::string& name, ResponseFunction w);
void clear_plugin_responses();

} // namespace cosserat
