#pragma once

// Reader for the subset of TOML used by run configurations: comments, bare
// keys, [table] and [[array-of-tables]] headers, and scalar values (numbers,
// basic strings, booleans).

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace qmep::cli {

using ConfigValue = std::variant<double, std::string, bool>;

class ConfigTable {
public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  /// Throws ConfigError when the key is missing or not of the requested type.
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

  void set(const std::string& key, ConfigValue v, int line);
  const std::map<std::string, ConfigValue>& values() const { return values_; }
  /// Throws ConfigError naming the first key outside allowed.
  void require_only(const std::vector<std::string>& allowed, const std::string& where) const;

private:
  std::map<std::string, ConfigValue> values_;
};

struct ConfigDocument {
  ConfigTable root;
  std::map<std::string, ConfigTable> tables;
  std::map<std::string, std::vector<ConfigTable>> arrays;

  const ConfigTable* table(const std::string& name) const;
};

/// Throws ConfigError with the line number on malformed input.
ConfigDocument parse_config(const std::string& text);
/// Throws ConfigError when the file cannot be read or parsed.
ConfigDocument load_config(const std::string& path);

}  // namespace qmep::cli
