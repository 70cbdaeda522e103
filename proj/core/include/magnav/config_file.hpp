// Sectioned key-value config parser ("[section]" headers, "key = value"
// lines, '#' comments) with line-numbered diagnostics.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace magnav {

/// Raised on malformed files and on type/missing-key lookups. The message
/// always names the file, the offending line or key, and the constraint.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigFile {
 public:
  /// Parses `path`; throws ConfigError naming file and line on syntax
  /// errors (bad section header, missing '=', duplicate key).
  static ConfigFile parse_file(const std::string& path);

  /// Parses in-memory text; `origin` is used in diagnostics.
  static ConfigFile parse_string(const std::string& text,
                                 const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  /// Typed lookups. The no-default overloads throw ConfigError when the key
  /// is absent; all throw when the value cannot be parsed as the requested
  /// type, naming "section.key" and the source line.
  std::string get_string(const std::string& section,
                         const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  /// Three whitespace- or comma-separated numbers.
  Eigen::Vector3d get_vec3(const std::string& section,
                           const std::string& key) const;
  Eigen::Vector3d get_vec3(const std::string& section, const std::string& key,
                           const Eigen::Vector3d& fallback) const;
  /// Whitespace- or comma-separated integer list.
  std::vector<int> get_int_list(const std::string& section,
                                const std::string& key,
                                const std::vector<int>& fallback) const;

  /// All (section, key) pairs in file order; lets callers reject unknown
  /// keys with a line diagnostic via `line_of`.
  std::vector<std::pair<std::string, std::string>> keys() const;
  int line_of(const std::string& section, const std::string& key) const;

  const std::string& origin() const { return origin_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  const Entry* find(const std::string& section, const std::string& key) const;
  const Entry& require(const std::string& section,
                       const std::string& key) const;
  [[noreturn]] void fail_value(const std::string& section,
                               const std::string& key, const Entry& entry,
                               const std::string& expected) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::vector<std::pair<std::string, std::string>> order_;
};

}  // namespace magnav
