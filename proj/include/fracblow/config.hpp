/*
 Copyright 2026 The fracblow Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracblow {

/// Malformed input; the message names the source, line and field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sectioned key-value text:
///
///   # comment
///   seed = 7
///   [domain]
///   shape = ball
///   center = 0, 0
///
/// Keys before the first section header belong to the unnamed section "".
class Config {
 public:
  using Schema = std::map<std::string, std::set<std::string>>;

  static Config parse(std::istream& in, const std::string& source = "<input>");
  static Config parse_string(const std::string& text, const std::string& source = "<input>");
  static Config load(const std::string& path);

  /// Applies `section.key=value` (or `key=value` for the unnamed section).
  void override_with(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Throws ConfigError for the first section or key not in the schema.
  void check_schema(const Schema& schema) const;

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// "<source>:<line>: section.key" for messages.
  std::string where(const std::string& section, const std::string& key) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* find(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

}  // namespace fracblow
