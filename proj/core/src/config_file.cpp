#include "magnav/config_file.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace magnav {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Splits on commas and/or whitespace, dropping empty tokens.
std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty() && errno != ERANGE;
}

bool parse_int(const std::string& s, long long& out) {
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end == s.c_str() + s.size() && !s.empty() && errno != ERANGE;
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_string(ss.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text,
                                    const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw ConfigError(origin + ":" + std::to_string(line) +
                          ": malformed section header '" + s + "'");
      }
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": expected 'key = value', got '" + s + "'");
    }
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": empty key before '='");
    }
    if (section.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line) + ": key '" + key +
                        "' appears before any [section] header");
    }
    auto [it, inserted] = cfg.sections_[section].emplace(key, Entry{value, line});
    if (!inserted) {
      throw ConfigError(origin + ":" + std::to_string(line) +
                        ": duplicate key '" + section + "." + key +
                        "' (first set on line " + std::to_string(it->second.line) +
                        ")");
    }
    cfg.order_.emplace_back(section, key);
  }
  return cfg;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return nullptr;
  auto kit = sit->second.find(key);
  return kit == sit->second.end() ? nullptr : &kit->second;
}

const ConfigFile::Entry& ConfigFile::require(const std::string& section,
                                             const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) {
    throw ConfigError(origin_ + ": missing required key '" + section + "." +
                      key + "'");
  }
  return *e;
}

void ConfigFile::fail_value(const std::string& section, const std::string& key,
                            const Entry& entry,
                            const std::string& expected) const {
  throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": key '" +
                    section + "." + key + "': cannot parse '" + entry.value +
                    "' as " + expected);
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key) const {
  return require(section, key).value;
}

std::string ConfigFile::get_string(const std::string& section,
                                   const std::string& key,
                                   const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key) const {
  const Entry& e = require(section, key);
  double v;
  if (!parse_double(e.value, v)) fail_value(section, key, e, "a number");
  return v;
}

double ConfigFile::get_double(const std::string& section,
                              const std::string& key, double fallback) const {
  return find(section, key) ? get_double(section, key) : fallback;
}

long long ConfigFile::get_int(const std::string& section,
                              const std::string& key) const {
  const Entry& e = require(section, key);
  long long v;
  if (!parse_int(e.value, v)) fail_value(section, key, e, "an integer");
  return v;
}

long long ConfigFile::get_int(const std::string& section,
                              const std::string& key,
                              long long fallback) const {
  return find(section, key) ? get_int(section, key) : fallback;
}

bool ConfigFile::get_bool(const std::string& section,
                          const std::string& key) const {
  const Entry& e = require(section, key);
  std::string v = e.value;
  for (char& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  fail_value(section, key, e, "a boolean (true/false/on/off/yes/no/1/0)");
}

bool ConfigFile::get_bool(const std::string& section, const std::string& key,
                          bool fallback) const {
  return find(section, key) ? get_bool(section, key) : fallback;
}

Eigen::Vector3d ConfigFile::get_vec3(const std::string& section,
                                     const std::string& key) const {
  const Entry& e = require(section, key);
  auto tokens = split_list(e.value);
  Eigen::Vector3d v;
  if (tokens.size() != 3) fail_value(section, key, e, "three numbers");
  for (int i = 0; i < 3; ++i) {
    if (!parse_double(tokens[i], v[i])) {
      fail_value(section, key, e, "three numbers");
    }
  }
  return v;
}

Eigen::Vector3d ConfigFile::get_vec3(const std::string& section,
                                     const std::string& key,
                                     const Eigen::Vector3d& fallback) const {
  return find(section, key) ? get_vec3(section, key) : fallback;
}

std::vector<int> ConfigFile::get_int_list(const std::string& section,
                                          const std::string& key,
                                          const std::vector<int>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  auto tokens = split_list(e->value);
  std::vector<int> out;
  for (const auto& tok : tokens) {
    long long v;
    if (!parse_int(tok, v)) fail_value(section, key, *e, "an integer list");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> ConfigFile::keys() const {
  return order_;
}

int ConfigFile::line_of(const std::string& section,
                        const std::string& key) const {
  const Entry* e = find(section, key);
  return e ? e->line : 0;
}

}  // namespace magnav
