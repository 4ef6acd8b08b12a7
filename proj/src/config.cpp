#include "csl/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csl/errors.hpp"

namespace csl {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::string format_json_scalar(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError("unsupported JSON value: " + v.dump());
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(std::string_view text) {
  KeyValueConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + body + "'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.set(key, trim(std::string_view(body).substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  KeyValueConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ',';
        joined += format_json_scalar(item);
      }
      cfg.set(key, joined);
    } else {
      cfg.set(key, format_json_scalar(value));
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_json(buf.str());
  return parse_text(buf.str());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void KeyValueConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override has an empty key");
  set(key, trim(assignment.substr(eq + 1)));
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
  return parse_number(key, it->second);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return find_double(key).value_or(fallback);
}

std::optional<double> KeyValueConfig::find_double(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return parse_number(key, it->second);
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const double v = parse_number(key, it->second);
  if (v != static_cast<double>(static_cast<long>(v))) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + it->second + "'");
  }
  return static_cast<long>(v);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_list(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
  std::vector<double> out;
  std::string_view rest = it->second;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_number(key, std::string(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void KeyValueConfig::require_known(const std::vector<std::string>& valid, const std::string& scenario) const {
  std::vector<std::string> unknown;
  for (const auto& [key, value] : entries_) {
    if (std::find(valid.begin(), valid.end(), key) == valid.end()) unknown.push_back(key);
  }
  if (unknown.empty()) return;
  std::string msg = "unknown key(s) for scenario '" + scenario + "':";
  for (const auto& k : unknown) msg += " " + k;
  msg += "; valid keys:";
  for (const auto& k : valid) msg += " " + k;
  throw ConfigError(msg);
}

bool has_physical_params(const KeyValueConfig& cfg) {
  for (const auto& k : physical_keys()) {
    if (cfg.has(k)) return true;
  }
  return false;
}

PhysParams physparams_from_config(const KeyValueConfig& cfg) {
  if (cfg.has("mass_amu") == cfg.has("mass_m0")) {
    throw ConfigError("physical parameters need exactly one of mass_amu or mass_m0");
  }
  const double mass_kg = cfg.has("mass_amu") ? cfg.get_double("mass_amu") * constants::amu_si
                                             : cfg.get_double("mass_m0") * constants::nucleon_mass_si;
  const std::string name = cfg.get_string("preset", "grw");
  if (name != "grw") throw ConfigError("unknown parameter preset '" + name + "' (available: grw)");
  PhysParams p = preset(name, mass_kg);
  p.lambda0 = cfg.get_double("lambda0", p.lambda0);
  p.alpha = cfg.get_double("alpha", p.alpha);
  p.validate();
  return p;
}

}  // namespace csl
