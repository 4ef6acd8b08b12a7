#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csl/params.hpp"

namespace csl {

/// Flat key=value configuration. Values are kept as text and converted on
/// access; malformed values raise ConfigError.
class KeyValueConfig {
 public:
  /// `key = value` lines, `#` starts a comment, blank lines ignored.
  static KeyValueConfig parse_text(std::string_view text);
  /// A flat JSON object whose values are numbers, strings, booleans or
  /// arrays of numbers.
  static KeyValueConfig parse_json(std::string_view text);
  /// Chooses the JSON parser for a `.json` extension, key=value otherwise.
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  /// Parses "key=value" and sets it.
  void apply_override(std::string_view assignment);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> find_double(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma separated list of numbers; a single number is a one-element list.
  std::vector<double> get_list(const std::string& key) const;

  /// Throws ConfigError naming every unknown key and listing the valid ones.
  void require_known(const std::vector<std::string>& valid, const std::string& scenario) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Keys understood by physparams_from_config.
inline const std::vector<std::string>& physical_keys() {
  static const std::vector<std::string> keys{"preset", "lambda0", "alpha", "mass_amu", "mass_m0"};
  return keys;
}

/// True when the config describes SI physical parameters rather than a
/// dimensionless D.
bool has_physical_params(const KeyValueConfig& cfg);

/// Builds SI parameters from `preset` (default "grw"), `lambda0`, `alpha`
/// and the mass, given as exactly one of `mass_amu` (atomic mass units) or
/// `mass_m0` (nucleon masses).
PhysParams physparams_from_config(const KeyValueConfig& cfg);

}  // namespace csl
