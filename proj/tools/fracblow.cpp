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


#include <CLI11.hpp>

#include <functional>
#include <string>

#include "commands.hpp"

namespace {

const char* kConfigHelp =
    "Configuration file: sections [domain] [kernel] [family] [data] [solver] [quadrature]\n"
    "[barriers] [analysis] [output]. Unknown sections or keys are rejected.";

const char* kEpilog =
    "Environment:\n"
    "  FRACBLOW_THREADS  worker threads for quadrature and assembly (default: all cores)\n"
    "Exit codes:\n"
    "  0 success, 1 invalid input, 2 numerical failure (failure.json is written to --out)";

void add_common(CLI::App* sub, fracblow::cli::CommonOptions& common) {
  sub->add_option("-c,--config", common.config_path, kConfigHelp)->check(CLI::ExistingFile);
  sub->add_option("--set", common.overrides, "Override a config value: section.key=value (repeatable)");
  sub->add_option("-o,--out", common.out_dir, "Output directory for CSV and JSON artifacts")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fracblow::cli;
  CLI::App app{"fracblow: numerical workbench for fractional and nonlocal operators"};
  app.footer(kEpilog);
  app.require_subcommand(1);
  app.set_version_flag("--version", "fracblow 0.1.0");

  CommonOptions common;
  EvalOptions eval;
  CConstantOptions cconst;
  std::function<int()> action;

  auto* e = app.add_subcommand("eval", "Evaluate a nonlocal operator on a built-in field at points");
  add_common(e, common);
  e->add_option("-f,--field", eval.field,
                "Field: dist-pow:TAU, ball-profile, halfspace-profile[:TAU], indicator, gaussian[:SIGMA],\n"
                "halfspace-mode:P1[,P2], constant:C")
      ->required();
  e->add_option("--op", eval.op, "Operator: linear, frac-laplacian, pucci-plus, pucci-minus, isaacs")
      ->capture_default_str();
  e->add_option("-p,--point", eval.points, "Point as comma-separated coordinates (repeatable)");
  e->add_option("--points-file", eval.points_file, "File with one point per line")->check(CLI::ExistingFile);
  e->add_option("--s", eval.s, "Fractional order (overrides kernel.s)");
  e->add_option("--dim", eval.dim, "Dimension N (overrides kernel.N)");
  e->callback([&] { action = [&] { return cmd_eval(common, eval); }; });

  auto* c = app.add_subcommand("c-constant", "Half-space constant c_K(tau) of the kernel");
  add_common(c, common);
  c->add_option("--tau", cconst.taus, "Exponent in (-1, 2s) (repeatable; default: a grid)");
  c->add_option("--s", cconst.s, "Fractional order (overrides kernel.s)");
  c->add_option("--dim", cconst.dim, "Dimension N (overrides kernel.N)");
  c->callback([&] { action = [&] { return cmd_c_constant(common, cconst); }; });

  struct Plain {
    const char* name;
    const char* help;
    int (*fn)(const CommonOptions&);
  };
  const Plain plain[] = {
      {"solve", "Solve the Dirichlet problem with a boundary blow-up layer; writes solution.csv and report.json",
       cmd_solve},
      {"verify-barriers", "Build and certify the upper and lower barriers; writes barriers.json", cmd_verify_barriers},
      {"profile", "Boundary profile d^{1-s} u along inward normals; writes profile.json/csv", cmd_profile},
      {"rates", "Gradient blow-up rate fit; writes rates.json/csv", cmd_rates},
      {"limit", "Limit coefficients as s -> 1; writes limit.json/csv", cmd_limit},
      {"check-lemma", "Leading-order product formula near the boundary; writes lemma.json/csv", cmd_check_lemma},
      {"check-halfspace", "Harmonicity checks for the half-space mode; writes halfspace.json/csv",
       cmd_check_halfspace},
  };
  for (const Plain& p : plain) {
    auto* sub = app.add_subcommand(p.name, p.help);
    add_common(sub, common);
    auto fn = p.fn;
    sub->callback([&, fn] { action = [&, fn] { return fn(common); }; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    int code = app.exit(err);
    return code == 0 ? 0 : 1;
  }
  std::string name = app.get_subcommands().front()->get_name();
  return guarded(common.out_dir, name, action);
}
