#include "config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "dysonlab/report.hpp"

namespace dysonlab::cli {

namespace {

std::string location(const std::string& source, int line, const std::string& field) {
  std::string out = source.empty() ? std::string("config") : source;
  if (line > 0) out += ":" + std::to_string(line);
  if (!field.empty()) out += ": field '" + field + "'";
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Drops a trailing '#' comment that is not inside quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return true;
}

std::vector<std::string> split_list(std::string v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[') {
    v = v.back() == ']' ? v.substr(1, v.size() - 2) : v.substr(1);
  }
  std::vector<std::string> items;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(unquote(item));
  }
  return items;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& field, const std::string& message)
    : Error(location(source, line, field) + ": " + message), source_(source), line_(line), field_(field) {}

Config Config::parse_text(const std::string& text, const std::string& source) {
  Config c;
  std::stringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string body = trim(strip_comment(raw));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "", "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(source, line, key, "invalid key");
    if (value.empty()) throw ConfigError(source, line, key, "missing value");
    c.set(key, unquote(value), source, line);
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "", "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

void Config::set_override(const std::string& assignment, const std::string& source) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(source, 0, assignment, "expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!valid_key(key)) throw ConfigError(source, 0, key, "invalid key");
  if (value.empty()) throw ConfigError(source, 0, key, "missing value");
  set(key, unquote(value), source, 0);
}

void Config::set(const std::string& key, const std::string& value, const std::string& source, int line) {
  entries_[key] = Entry{value, source, line};
}

void Config::require_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, entry] : entries_) {
    bool ok = false;
    for (const auto& a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError(entry.source, entry.line, key, "unknown key for this subcommand");
  }
}

void Config::fail(const std::string& key, const std::string& message) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("", 0, key, message);
  throw ConfigError(it->second.source, it->second.line, key, message);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  const std::string v = it == entries_.end() ? fallback : it->second.value;
  resolved_[key] = v;
  return v;
}

namespace {

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

template <typename T>
std::string list_text(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>)
      out += format_number(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

double Config::get_double(const std::string& key, double fallback) const {
  double v = fallback;
  if (has(key) && !parse_double(trim(entries_.at(key).value), v)) fail(key, "expected a finite number");
  resolved_[key] = format_number(v);
  return v;
}

long Config::get_int(const std::string& key, long fallback) const {
  long v = fallback;
  if (has(key) && !parse_long(trim(entries_.at(key).value), v)) fail(key, "expected an integer");
  resolved_[key] = std::to_string(v);
  return v;
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) {
    resolved_[key] = std::to_string(fallback);
    return fallback;
  }
  const std::string s = trim(entries_.at(key).value);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s.front() == '-' || errno != 0 || end != s.c_str() + s.size())
    fail(key, "expected a non-negative integer seed");
  resolved_[key] = std::to_string(v);
  return static_cast<std::uint64_t>(v);
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) {
    resolved_[key] = list_text(fallback);
    return fallback;
  }
  std::vector<double> out;
  for (const auto& item : split_list(entries_.at(key).value)) {
    double v = 0.0;
    if (!parse_double(item, v)) fail(key, "list item '" + item + "' is not a finite number");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "empty list");
  resolved_[key] = list_text(out);
  return out;
}

std::vector<long> Config::get_int_list(const std::string& key, const std::vector<long>& fallback) const {
  if (!has(key)) {
    resolved_[key] = list_text(fallback);
    return fallback;
  }
  std::vector<long> out;
  for (const auto& item : split_list(entries_.at(key).value)) {
    long v = 0;
    if (!parse_long(item, v)) fail(key, "list item '" + item + "' is not an integer");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "empty list");
  resolved_[key] = list_text(out);
  return out;
}

}  // namespace dysonlab::cli
