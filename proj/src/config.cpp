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


#include "fracblow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fracblow {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

bool parse_number(const std::string& text, double& out) {
  std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::string section;
  std::string raw;
  int line = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '"') quoted = !quoted;
      if (!quoted && (text[i] == '#' || text[i] == ';')) {
        text.resize(i);
        break;
      }
    }
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail("unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (!valid_name(section)) fail("invalid section name '" + section + "'");
      if (cfg.section_lines_.count(section)) fail("duplicate section [" + section + "]");
      cfg.section_lines_[section] = line;
      cfg.sections_[section];
      continue;
    }
    std::size_t eq = text.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (!valid_name(key)) fail("invalid key '" + key + "'");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    else if (std::count(value.begin(), value.end(), '"') != 0) fail("unbalanced quotes in value of '" + key + "'");
    auto& sec = cfg.sections_[section];
    if (sec.count(key)) fail("duplicate key '" + key + "'");
    sec[key] = Entry{value, line};
  }
  return cfg;
}

Config Config::parse_string(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return parse(in, source);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse(in, path);
}

void Config::override_with(const std::string& assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "': expected section.key=value");
  std::string lhs = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  std::size_t dot = lhs.find('.');
  std::string section = dot == std::string::npos ? "" : lhs.substr(0, dot);
  std::string key = dot == std::string::npos ? lhs : lhs.substr(dot + 1);
  if ((!section.empty() && !valid_name(section)) || !valid_name(key))
    throw ConfigError("override '" + assignment + "': invalid name");
  set(section, key, value);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = Entry{value, 0};
}

void Config::check_schema(const Schema& schema) const {
  for (const auto& [section, entries] : sections_) {
    auto it = schema.find(section);
    if (it == schema.end()) {
      auto ln = section_lines_.find(section);
      std::string at = source_ + ":" + std::to_string(ln == section_lines_.end() ? 0 : ln->second);
      throw ConfigError(at + ": unknown section [" + section + "]");
    }
    for (const auto& [key, entry] : entries)
      if (!it->second.count(key)) throw ConfigError(where(section, key) + ": unknown key");
  }
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  auto e = s->second.find(key);
  return e == s->second.end() ? nullptr : &e->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

std::string Config::where(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  std::string name = section.empty() ? key : section + "." + key;
  if (!e || e->line == 0) return "override " + name;
  return source_ + ":" + std::to_string(e->line) + ": " + name;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_number(e->value, v)) throw ConfigError(where(section, key) + ": expected a number, got '" + e->value + "'");
  return v;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_number(e->value, v) || v != std::floor(v) || std::abs(v) > 2e9)
    throw ConfigError(where(section, key) + ": expected an integer, got '" + e->value + "'");
  return static_cast<int>(v);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::string v = e->value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(where(section, key) + ": expected true or false, got '" + e->value + "'");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  std::stringstream ss(e->value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_number(item, v))
      throw ConfigError(where(section, key) + ": expected a comma-separated list of numbers, got '" + e->value + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError(where(section, key) + ": empty list");
  return out;
}

}  // namespace fracblow
