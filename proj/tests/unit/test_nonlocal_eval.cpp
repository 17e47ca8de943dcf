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

#include "fracblow/nonlocal_eval.hpp"

using namespace fracblow;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

// (-Delta)^s (1 - |x|^2)_+^s = 4^s Gamma(1 + s) Gamma(N/2 + s) / Gamma(N/2) in B_1.
double torsion_oracle(int N, double s) {
  return std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(0.5 * N + s) / std::tgamma(0.5 * N);
}

}  // namespace

TEST(NonlocalEval, ConstantFieldGivesZero) {
  QuadratureConfig q;
  FieldPtr c = constant_field(2, 4.0);
  EvalResult r = frac_laplacian(*c, v2(0.3, 0.1), 0.5, q);
  EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(NonlocalEval, TorsionFunctionMatchesClosedForm) {
  auto ball = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  QuadratureConfig q;
  for (double s : {0.25, 0.5, 0.75}) {
    FieldPtr u = dist_function_field(ball, [s](double d) { return std::pow(d * (2.0 - d), s); }, "torsion");
    for (Vec x : {v2(0.2, 0.1), v2(0.4, 0.3), v2(-0.1, 0.85)}) {
      EvalResult r = frac_laplacian(*u, x, s, q);
      double expected = -torsion_oracle(2, s);
      EXPECT_NEAR(r.value, expected, 1e-3 * std::abs(expected)) << "s=" << s;
      EXPECT_LE(std::abs(r.value - expected), std::max(10.0 * r.error_estimate, 1e-6)) << "s=" << s;
    }
  }
}

TEST(NonlocalEval, PucciWithEqualBoundsIsTheFractionalLaplacian) {
  auto ball = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  FieldPtr u = ball_profile_field(ball, 0.4);
  QuadratureConfig q;
  double C = normalizing_constant(2, 0.4);
  Vec x = v2(0.2, -0.5);
  EvalResult a = frac_laplacian(*u, x, 0.4, q);
  EvalResult p = pucci_plus(*u, x, EllipticityBounds(C, C), 0.4, q);
  EvalResult m = pucci_minus(*u, x, EllipticityBounds(C, C), 0.4, q);
  EXPECT_NEAR(p.value, a.value, 1e-10);
  EXPECT_NEAR(m.value, a.value, 1e-10);
  EvalResult wide = pucci_plus(*u, x, EllipticityBounds(0.5 * C, 2.0 * C), 0.4, q);
  EvalResult low = pucci_minus(*u, x, EllipticityBounds(0.5 * C, 2.0 * C), 0.4, q);
  EXPECT_GE(wide.value, low.value);
}

TEST(NonlocalEval, HalfSpaceMomentOfIsotropicKernel) {
  // N = 2: int_0^pi sin^{2s} = sqrt(pi) Gamma(s + 1/2) / Gamma(s + 1).
  QuadratureConfig q;
  double s = 0.3;
  Kernel k = Kernel::isotropic(2, s, false);
  double expected = std::sqrt(kPi) * std::tgamma(s + 0.5) / std::tgamma(s + 1.0);
  EXPECT_NEAR(half_space_moment(k, q).value, expected, 1e-10);
}

TEST(NonlocalEval, HalfSpaceConstantSignPattern) {
  QuadratureConfig q;
  double s = 0.5;
  Kernel k = Kernel::isotropic(2, s, true);
  EXPECT_LT(c_constant(k, 0.0, q).value, 0.0);
  EXPECT_LT(c_constant(k, 0.2, q).value, 0.0);
  EXPECT_GT(c_constant(k, -0.75, q).value, 0.0);
  EXPECT_GT(c_constant(k, 0.9, q).value, 0.0);
  EXPECT_NEAR(c_constant(k, s - 1.0, q).value, 0.0, 1e-6);
  EXPECT_NEAR(c_constant(k, s, q).value, 0.0, 1e-6);
  EXPECT_THROW(c_constant(k, 1.0, q), std::domain_error);
}

TEST(NonlocalEval, BilinearFormIsSymmetricAndPolarizes) {
  QuadratureConfig q;
  Kernel k = Kernel::isotropic(2, 0.5, true);
  FieldPtr f = gaussian_field(Vec::Zero(2), 0.5);
  FieldPtr g = gaussian_field(v2(0.3, 0.0), 0.7);
  Vec x = v2(0.1, 0.2);
  EvalResult fg = bilinear_form(k, *f, *g, x, q);
  EvalResult gf = bilinear_form(k, *g, *f, x, q);
  EXPECT_NEAR(fg.value, gf.value, 1e-12);
  // L(fg) = f L g + g L f + 2 B(f, g).
  EvalResult Lfg = linear_op(k, *product_field(f, g), x, q);
  double rhs = f->value(x) * linear_op(k, *g, x, q).value + g->value(x) * linear_op(k, *f, x, q).value +
               2.0 * fg.value;
  EXPECT_NEAR(Lfg.value, rhs, 1e-6 * std::abs(Lfg.value) + 1e-8);
}

TEST(NonlocalEval, IsaacsWithOneMemberIsLinear) {
  QuadratureConfig q;
  Kernel k(2, 0.5, Anisotropy::constant(1.5), true);
  KernelFamily fam({{k}}, EllipticityBounds(0.1, 10.0));
  FieldPtr u = gaussian_field(Vec::Zero(2), 0.5);
  Vec x = v2(0.2, 0.1);
  EXPECT_NEAR(isaacs_op(fam, *u, x, q).value, linear_op(k, *u, x, q).value, 1e-12);
}
