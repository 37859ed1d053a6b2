#include "qmep/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qmep/errors.hpp"

namespace qmep::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

ConfigValue parse_value(const std::string& raw, int line) {
  if (raw.empty()) fail(line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) {
        const char n = raw[++i];
        if (n == 'n') out += '\n';
        else if (n == 't') out += '\t';
        else if (n == '"' || n == '\\') out += n;
        else fail(line, "unsupported escape");
      } else if (raw[i] == '"') {
        fail(line, "unexpected quote in string");
      } else {
        out += raw[i];
      }
    }
    return out;
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::string digits;
  for (char c : raw)
    if (c != '_') digits += c;
  if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) fail(line, "cannot parse value '" + raw + "'");
  return v;
}

}  // namespace

double ConfigTable::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  throw ConfigError("key '" + key + "' must be a number");
}

double ConfigTable::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::string ConfigTable::string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
  throw ConfigError("key '" + key + "' must be a string");
}

std::string ConfigTable::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

bool ConfigTable::boolean_or(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* v = std::get_if<bool>(&it->second)) return *v;
  throw ConfigError("key '" + key + "' must be true or false");
}

void ConfigTable::set(const std::string& key, ConfigValue v, int line) {
  if (!values_.emplace(key, std::move(v)).second) fail(line, "duplicate key '" + key + "'");
}

void ConfigTable::require_only(const std::vector<std::string>& allowed, const std::string& where) const {
  for (const auto& [k, v] : values_) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == k;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

const ConfigTable* ConfigDocument::table(const std::string& name) const {
  const auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

ConfigDocument parse_config(const std::string& text) {
  ConfigDocument doc;
  ConfigTable* current = &doc.root;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.rfind("[[", 0) == 0) {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]") fail(line_no, "malformed array header");
      const std::string name = trim(line.substr(2, line.size() - 4));
      if (!valid_key(name)) fail(line_no, "invalid table name");
      if (doc.tables.count(name)) fail(line_no, "'" + name + "' is already a table");
      auto& list = doc.arrays[name];
      list.emplace_back();
      current = &list.back();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "malformed table header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!valid_key(name)) fail(line_no, "invalid table name");
      if (doc.tables.count(name) || doc.arrays.count(name)) fail(line_no, "duplicate table '" + name + "'");
      current = &doc.tables[name];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key)) fail(line_no, "invalid key '" + key + "'");
    current->set(key, parse_value(trim(line.substr(eq + 1)), line_no), line_no);
  }
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace qmep::cli
