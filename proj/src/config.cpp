#include "dsp/config.hpp"

#include "dsp/error.hpp"
#include "dsp/pmf_spec.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dsp {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(std::string_view key) {
  return !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-';
  });
}

std::vector<ConfigEntry> parse_toml(std::string_view text) {
  std::vector<ConfigEntry> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);

    // A '#' inside a quoted string is not a comment.
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '"') quoted = !quoted;
      if (line[k] == '#' && !quoted) {
        line = line.substr(0, k);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') throw ConfigError(where + ": tables are not supported; use flat keys");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected `key = value`");
    const auto key = trim(line.substr(0, eq));
    const auto raw = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
    if (raw.empty()) throw ConfigError(where + ": missing value for '" + std::string(key) + "'");

    ConfigEntry entry{std::string(key), 0.0, where};
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"') throw ConfigError(where + ": unterminated string");
      entry.value = std::string(raw.substr(1, raw.size() - 2));
    } else {
      double v = 0.0;
      const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
        throw ConfigError(where + ": value of '" + std::string(key) + "' is not a number");
      }
      entry.value = v;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<ConfigEntry> parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("byte " + std::to_string(e.byte) + ": malformed JSON");
  }
  if (!doc.is_object()) throw ConfigError("top level must be a JSON object");
  std::vector<ConfigEntry> out;
  for (const auto& [key, value] : doc.items()) {
    const std::string where = "field '" + key + "'";
    if (value.is_number()) {
      out.push_back({key, value.get<double>(), where});
    } else if (value.is_string()) {
      out.push_back({key, value.get<std::string>(), where});
    } else {
      throw ConfigError(where + ": expected a number or a string");
    }
  }
  return out;
}

double number(const ConfigEntry& e) {
  if (const auto* v = std::get_if<double>(&e.value)) return *v;
  throw ConfigError(e.where + ": '" + e.key + "' expects a number");
}

}  // namespace

std::vector<ConfigEntry> parse_config_text(std::string_view text, ConfigFormat format) {
  return format == ConfigFormat::Json ? parse_json(text) : parse_toml(text);
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool json = (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) ||
                    (first != std::string::npos && text[first] == '{');
  try {
    return parse_config_text(text, json ? ConfigFormat::Json : ConfigFormat::Toml);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "zeta_p", "h_p",      "v_p",     "tau_p",        "zeta_v",           "h_v", "v_v", "tau_v",
      "capacity", "area", "beta_vrp", "horizon", "lambda_slope", "lambda_intercept", "pmf"};
  return keys;
}

void apply_config(const std::vector<ConfigEntry>& entries, Defaults& defaults) {
  auto& p = defaults.params;
  for (const auto& e : entries) {
    const auto& k = e.key;
    if (k == "pmf") {
      const auto* spec = std::get_if<std::string>(&e.value);
      if (!spec) throw ConfigError(e.where + ": 'pmf' expects a string such as \"tpois:10,20\"");
      try {
        defaults.pmf = parse_pmf_spec(*spec);
      } catch (const ConfigError& err) {
        throw ConfigError(e.where + ": " + err.what());
      }
      continue;
    }
    const double v = number(e);
    if (k == "zeta_p") p.zeta_p = v;
    else if (k == "h_p") p.h_p = v;
    else if (k == "v_p") p.v_p = v;
    else if (k == "tau_p") p.tau_p = v;
    else if (k == "zeta_v") p.zeta_v = v;
    else if (k == "h_v") p.h_v = v;
    else if (k == "v_v") p.v_v = v;
    else if (k == "tau_v") p.tau_v = v;
    else if (k == "area") p.area = v;
    else if (k == "beta_vrp") p.beta_vrp = v;
    else if (k == "horizon") p.horizon = v;
    else if (k == "lambda_slope") defaults.model.slope = v;
    else if (k == "lambda_intercept") defaults.model.intercept = v;
    else if (k == "capacity") {
      if (v != std::floor(v) || v < 1 || v > 1e9) throw ConfigError(e.where + ": 'capacity' must be a positive integer");
      p.capacity = static_cast<int>(v);
    } else {
      throw ConfigError(e.where + ": unknown key '" + k + "'");
    }
  }
  try {
    p.validate();
  } catch (const InvalidArgument& err) {
    throw ConfigError(err.what());
  }
  if (defaults.model.slope < 0.0) throw ConfigError("lambda_slope must be nonnegative");
}

}  // namespace dsp
