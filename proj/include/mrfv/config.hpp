#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mrfv/core.hpp"

namespace mrfv {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Flat key-value configuration with INI-style sections.  Keys are stored as
/// "section.key"; values are strings parsed on access.
class Config {
 public:
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  /// Applies a "section.key=value" override string.
  void apply_override(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw IoError("override '" + spec + "' is not of the form section.key=value");
    const std::string key = detail::trim(spec.substr(0, eq));
    if (key.empty() || key.find('.') == std::string::npos)
      throw IoError("override key '" + key + "' must be section.key");
    set(key, detail::trim(spec.substr(eq + 1)));
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw IoError("missing required config key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : to_double(key, it->second);
  }

  int get_int(const std::string& key, int fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : to_int(key, it->second);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw IoError("config key '" + key + "': cannot parse '" + v + "' as bool");
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

  void load_stream(std::istream& in) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw IoError("config line " + std::to_string(lineno) + ": unterminated section header");
        section = detail::trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw IoError("config line " + std::to_string(lineno) + ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw IoError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      if (key.empty())
        throw IoError("config line " + std::to_string(lineno) + ": empty key");
      if (section.empty())
        throw IoError("config line " + std::to_string(lineno) + ": key outside any [section]");
      set(section + "." + key, detail::trim(line.substr(eq + 1)));
    }
  }

  static Config load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    Config cfg;
    cfg.load_stream(in);
    return cfg;
  }

 private:
  static double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw IoError("config key '" + key + "': cannot parse '" + v + "' as number");
    return x;
  }

  static int to_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
      throw IoError("config key '" + key + "': cannot parse '" + v + "' as integer");
    return static_cast<int>(x);
  }

  std::map<std::string, std::string> kv_;
};

}  // namespace mrfv
