#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sqg {

// Flat key = value configuration. Lines starting with '#' are comments,
// lists are comma separated and may be wrapped in brackets.
class Config {
 public:
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");
  static Config parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  // "key=value"
  void apply_override(const std::string& assignment);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void erase(const std::string& key) { values_.erase(key); }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  std::optional<std::string> raw(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // keys not in the allowed list raise ConfigError
  void require_known(const std::vector<std::string>& allowed) const;

  // sorted key=value lines, excluding keys that only affect where output goes
  std::string canonical() const;
  // lowercase hex SHA-256 of canonical()
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

std::string sha256_hex(const std::string& data);
std::string format_number(double v);
std::string format_list(const std::vector<double>& v);
std::string format_list(const std::vector<int>& v);

}  // namespace sqg
