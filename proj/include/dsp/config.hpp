#pragma once

#include "dsp/scenarios.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dsp {

enum class ConfigFormat { Json, Toml };

struct ConfigEntry {
  std::string key;
  std::variant<double, std::string> value;
  std::string where;  // "line 3" or "field 'h_p'", used in diagnostics
};

// Flat key/value documents: a JSON object of numbers and strings, or TOML-style
// `key = value` lines with `#` comments. Throws ConfigError with the offending
// line or field.
std::vector<ConfigEntry> parse_config_text(std::string_view text, ConfigFormat format);

// JSON when the path ends in .json or the first non-blank character is '{'.
std::vector<ConfigEntry> read_config_file(const std::string& path);

// Keys: zeta_p h_p v_p tau_p zeta_v h_v v_v tau_v (hours) capacity area beta_vrp
// horizon lambda_slope lambda_intercept pmf. Unknown keys and wrong value types throw
// ConfigError; the result is validated.
void apply_config(const std::vector<ConfigEntry>& entries, Defaults& defaults);

// Keys understood by apply_config, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace dsp
