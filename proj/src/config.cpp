#include "sqg/config.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sqg/error.hpp"

namespace sqg {

namespace {

const std::set<std::string> kOutputOnly = {"out", "formats"};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error(ErrorKind::ConfigError, fmt::format("key '{}': '{}' is not a number", key, text));
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw Error(ErrorKind::ConfigError, fmt::format("key '{}': '{}' is not an integer", key, text));
  return v;
}

std::vector<std::string> split_list(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw Error(ErrorKind::ConfigError, fmt::format("key '{}': unterminated list", key));
    t = t.substr(1, t.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw Error(ErrorKind::ConfigError, fmt::format("key '{}': empty list element", key));
    out.push_back(item);
  }
  if (out.empty()) throw Error(ErrorKind::ConfigError, fmt::format("key '{}': list is empty", key));
  return out;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, fmt::format("{}:{}: expected key = value", origin, lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw Error(ErrorKind::ConfigError, fmt::format("{}:{}: bad key '{}'", origin, lineno, key));
    if (c.values_.count(key)) throw Error(ErrorKind::ConfigError, fmt::format("{}:{}: duplicate key '{}'", origin, lineno, key));
    c.values_[key] = value;
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw Error(ErrorKind::ConfigError, "bad key '" + key + "'");
  values_[key] = trim(value);
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "override must look like key=value: " + assignment);
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return raw(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = raw(key);
  return v ? parse_double(key, *v) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto v = raw(key);
  return v ? parse_int(key, *v) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::string s = *v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorKind::ConfigError, fmt::format("key '{}': '{}' is not a boolean", key, *v));
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(key, *v)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(key, *v)) out.push_back(parse_int(key, item));
  return out;
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw Error(ErrorKind::ConfigError, "unknown config key '" + k + "'");
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    if (kOutputOnly.count(k)) continue;
    out += k + "=" + v + "\n";
  }
  return out;
}

std::string Config::hash() const { return sha256_hex(canonical()); }

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw Error(ErrorKind::ConfigError, "cannot allocate digest context");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, data.data(), data.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorKind::ConfigError, "SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out;
}

std::string format_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

}  // namespace sqg
