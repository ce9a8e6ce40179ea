#pragma once

// Run configuration read from a TOML-syntax file: [section] headers and
// `key = value` lines with strings, integers, floats, booleans and flat
// arrays. Unknown keys are rejected, every field is validated before a
// command runs, and `section.key=value` overrides are applied on top.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mshyper/dataset.hpp"
#include "mshyper/model_config.hpp"
#include "mshyper/synthetic.hpp"
#include "mshyper/training.hpp"

namespace mshyper {

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;

struct ConfigValue {
  std::variant<std::int64_t, double, bool, std::string, ConfigArray> value;
  int line = 0;
};

// Flattened "section.key" -> value.
using ConfigTable = std::map<std::string, ConfigValue>;

ConfigTable parse_config_table(const std::string& text, const std::string& source);
// Parses one value as written on the right-hand side of `key = value`.
ConfigValue parse_config_value(const std::string& text, const std::string& source);

struct RunConfig {
  ModelConfig model;
  // When model.variables is not given, it follows the data's column count.
  bool variables_from_data = true;
  std::string data_path;
  bool synthetic = false;
  SyntheticSpec synthetic_spec;
  SplitSpec split;
  TrainSettings train;
  std::string out_dir;  // empty: runs/<config hash>-<timestamp>

  // Canonical TOML rendering of every resolved field.
  std::string canonical() const;
  // FNV-1a over canonical(), as 16 hex digits.
  std::string hash() const;
};

// Throws ConfigError naming the field for missing required keys, type
// mismatches, unknown keys and constraint violations.
RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {},
                            const std::string& source = "<config>");
RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace mshyper
