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


#include <gtest/gtest.h>

#include "fracblow/config.hpp"

using fracblow::Config;
using fracblow::ConfigError;

namespace {

std::string error_of(const std::string& text) {
  try {
    Config::parse_string(text, "t.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ReadsSectionsAndTypes) {
  Config c = Config::parse_string(
      "seed = 3\n"
      "# comment\n"
      "[kernel]\n"
      "N = 2   ; trailing comment\n"
      "s = 0.25\n"
      "normalized = false\n"
      "[domain]\n"
      "center = 0.5, -1\n"
      "shape = \"ball\"\n");
  EXPECT_EQ(c.get_int("", "seed", 0), 3);
  EXPECT_EQ(c.get_int("kernel", "N", 0), 2);
  EXPECT_DOUBLE_EQ(c.get_double("kernel", "s", 0.0), 0.25);
  EXPECT_FALSE(c.get_bool("kernel", "normalized", true));
  EXPECT_EQ(c.get_doubles("domain", "center", {}), (std::vector<double>{0.5, -1.0}));
  EXPECT_EQ(c.get_string("domain", "shape", ""), "ball");
  EXPECT_EQ(c.get_double("solver", "delta", 0.05), 0.05);
  EXPECT_TRUE(c.has_section("kernel"));
  EXPECT_FALSE(c.has("kernel", "value"));
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(error_of("[kernel]\ns 0.5\n").find("t.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("[kernel\n").find("t.cfg:1"), std::string::npos);
  EXPECT_NE(error_of("[a]\nx = 1\nx = 2\n").find("t.cfg:3"), std::string::npos);
  EXPECT_NE(error_of("[a]\n[a]\n").find("t.cfg:2"), std::string::npos);
}

TEST(Config, BadValuesAreRejected) {
  Config c = Config::parse_string("[kernel]\ns = half\nN = 2.5\nflag = maybe\n", "t.cfg");
  EXPECT_THROW(c.get_double("kernel", "s", 0.0), ConfigError);
  EXPECT_THROW(c.get_int("kernel", "N", 0), ConfigError);
  EXPECT_THROW(c.get_bool("kernel", "flag", false), ConfigError);
  try {
    c.get_double("kernel", "s", 0.0);
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("kernel.s"), std::string::npos);
  }
}

TEST(Config, SchemaRejectsUnknownKeys) {
  Config::Schema schema = {{"", {"seed"}}, {"kernel", {"s", "N"}}};
  EXPECT_NO_THROW(Config::parse_string("seed = 1\n[kernel]\ns = 0.5\n").check_schema(schema));
  EXPECT_THROW(Config::parse_string("[kernel]\nt = 0.5\n").check_schema(schema), ConfigError);
  EXPECT_THROW(Config::parse_string("[solver]\ndelta = 0.5\n").check_schema(schema), ConfigError);
}

TEST(Config, OverridesReplaceValues) {
  Config c = Config::parse_string("[kernel]\ns = 0.5\n");
  c.override_with("kernel.s=0.75");
  c.override_with("seed=9");
  EXPECT_DOUBLE_EQ(c.get_double("kernel", "s", 0.0), 0.75);
  EXPECT_EQ(c.get_int("", "seed", 0), 9);
  EXPECT_THROW(c.override_with("kernel.s"), ConfigError);
}
