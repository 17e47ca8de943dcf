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

#include <cmath>

#include "fracblow/solver.hpp"

using namespace fracblow;

namespace {

SolveConfig coarse() {
  SolveConfig c;
  c.delta = 0.15;
  c.spacing = 0.15;
  return c;
}

DomainPtr unit_disk() { return std::make_shared<Ball>(Vec::Zero(2), 1.0); }

}  // namespace

TEST(Solver, ConfigValidation) {
  SolveConfig c;
  c.delta = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SolveConfig();
  c.core_fraction = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_NO_THROW(SolveConfig().validate());
}

TEST(Solver, RowsAreMonotone) {
  DomainPtr dom = unit_disk();
  SolveConfig cfg = coarse();
  MeshPtr mesh = build_mesh(dom, cfg);
  ProblemData data = ProblemData::constant_trace(1.0);
  Vec c1(2);
  c1 << 1.0, 1.0;
  Kernel aniso(2, 0.5, Anisotropy::patches({c1, unit_vec(2, 0)}, {2.0, 0.5}), true);
  for (const Kernel& k : {Kernel::isotropic(2, 0.5, true), Kernel::isotropic(2, 0.8, true), aniso}) {
    DiscreteOperator op = assemble(k, mesh, data, cfg);
    EXPECT_EQ(op.monotonicity_violations(), 0u);
    // Diagonal dominance: D >= row sum of W.
    for (std::size_t r = 0; r < op.size(); ++r) EXPECT_GE(op.D[r], op.W.row(r).sum() - 1e-12 * op.D[r]);
  }
}

TEST(Solver, ConstantTraceGivesPositiveBlowUp) {
  DomainPtr dom = unit_disk();
  SolveReport rep;
  DiscreteSolution u = solve(Kernel::isotropic(2, 0.5, true), dom, ProblemData::constant_trace(1.0), coarse(), &rep);
  EXPECT_TRUE(rep.converged);
  EXPECT_GT(u.values().minCoeff(), 0.0);
  // Renormalized values near the boundary approach h = 1 (within the coarse-mesh bias).
  Vec x(2);
  x << 0.8, 0.0;
  EXPECT_NEAR(std::sqrt(0.2) * u(x), 1.0, 0.2);
}

TEST(Solver, ComparisonForOrderedData) {
  DomainPtr dom = unit_disk();
  Kernel k = Kernel::isotropic(2, 0.5, true);
  ProblemData lo, hi;
  lo.h = [](const Vec& x) { return 0.5 + 0.3 * x[0]; };
  hi.h = [](const Vec& x) { return 0.6 + 0.3 * x[0]; };
  lo.f = constant_field(2, 0.2);
  hi.f = constant_field(2, -0.1);
  DiscreteSolution a = solve(k, dom, lo, coarse());
  DiscreteSolution b = solve(k, dom, hi, coarse());
  EXPECT_TRUE(((b.values() - a.values()).array() > 0.0).all());
}

TEST(Solver, PucciWithEqualBoundsMatchesLinear) {
  DomainPtr dom = unit_disk();
  SolveConfig cfg = coarse();
  MeshPtr mesh = build_mesh(dom, cfg);
  ProblemData data = ProblemData::constant_trace(1.0);
  double C = normalizing_constant(2, 0.5);
  SolveReport lin = solve_linear(assemble(Kernel::isotropic(2, 0.5, true), mesh, data, cfg), cfg);
  SolveReport puc = solve_pucci(EllipticityBounds(C, C), true, 0.5, mesh, data, cfg);
  EXPECT_TRUE(puc.converged);
  EXPECT_LT((lin.u - puc.u).lpNorm<Eigen::Infinity>(), 1e-8 * lin.u.lpNorm<Eigen::Infinity>());
}

TEST(Solver, IsaacsOrderedBetweenPucciSolutions) {
  DomainPtr dom = unit_disk();
  SolveConfig cfg = coarse();
  MeshPtr mesh = build_mesh(dom, cfg);
  ProblemData data;
  data.h = [](const Vec& x) { return 1.0 + 0.5 * x[1]; };
  data.f = constant_field(2, -1.0);
  double C = normalizing_constant(2, 0.5);
  std::vector<std::vector<Kernel>> members = {
      {Kernel(2, 0.5, Anisotropy::constant(1.0), true), Kernel(2, 0.5, Anisotropy::constant(2.0), true)},
      {Kernel(2, 0.5, Anisotropy::constant(1.5), true), Kernel(2, 0.5, Anisotropy::constant(1.2), true)}};
  KernelFamily fam(members, EllipticityBounds(C, 2.0 * C));
  SolveReport isaacs = solve_isaacs(assemble_family(fam, mesh, data, cfg), cfg);
  SolveReport plus = solve_pucci(fam.bounds(), true, 0.5, mesh, data, cfg);
  SolveReport minus = solve_pucci(fam.bounds(), false, 0.5, mesh, data, cfg);
  ASSERT_TRUE(isaacs.converged && plus.converged && minus.converged);
  // M^- <= Isaacs <= M^+ as operators: the M^+ solution is an Isaacs supersolution.
  double tol = 1e-7 * plus.u.lpNorm<Eigen::Infinity>();
  EXPECT_TRUE(((plus.u - isaacs.u).array() >= -tol).all());
  EXPECT_TRUE(((isaacs.u - minus.u).array() >= -tol).all());
  EXPECT_GT((plus.u - minus.u).maxCoeff(), 1e-3);
}
