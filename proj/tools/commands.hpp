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

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracblow::cli {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::string out_dir = ".";
};

struct EvalOptions {
  std::string field;
  std::string op = "linear";
  std::vector<std::string> points;
  std::string points_file;
  std::optional<double> s;
  std::optional<int> dim;
};

struct CConstantOptions {
  std::vector<double> taus;
  std::optional<double> s;
  std::optional<int> dim;
};

int cmd_eval(const CommonOptions& common, const EvalOptions& opt);
int cmd_c_constant(const CommonOptions& common, const CConstantOptions& opt);
int cmd_solve(const CommonOptions& common);
int cmd_verify_barriers(const CommonOptions& common);
int cmd_profile(const CommonOptions& common);
int cmd_rates(const CommonOptions& common);
int cmd_limit(const CommonOptions& common);
int cmd_check_lemma(const CommonOptions& common);
int cmd_check_halfspace(const CommonOptions& common);

/// Runs a command body and maps exceptions to exit codes: 1 for invalid
/// input, 2 for numerical failures (with failure.json in the output dir).
int guarded(const std::string& out_dir, const std::string& command, const std::function<int()>& body);

}  // namespace fracblow::cli
