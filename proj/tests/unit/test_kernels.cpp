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

#include "fracblow/kernels.hpp"

using namespace fracblow;

// C_{N,s} = s 4^s Gamma(N/2 + s) / (pi^{N/2} Gamma(1 - s)), evaluated by hand.
TEST(Kernels, NormalizingConstantClosedForms) {
  EXPECT_NEAR(normalizing_constant(1, 0.5), 1.0 / kPi, 1e-14);
  EXPECT_NEAR(normalizing_constant(2, 0.5), 0.5 / kPi, 1e-14);
  EXPECT_NEAR(normalizing_constant(3, 0.5), 1.0 / (kPi * kPi), 1e-14);
  // N = 2, s = 1/4: (1/4) sqrt(2) Gamma(5/4) / (pi Gamma(3/4)).
  double expected = 0.25 * std::sqrt(2.0) * std::tgamma(1.25) / (kPi * std::tgamma(0.75));
  EXPECT_NEAR(normalizing_constant(2, 0.25), expected, 1e-14);
}

TEST(Kernels, NormalizingConstantNearOne) {
  // N = 2: C_{2,s} ~ 4 (1 - s) / pi as s -> 1.
  double s = 1.0 - 1e-6;
  EXPECT_NEAR(normalizing_constant(2, s) / (4.0 * (1.0 - s) / kPi), 1.0, 1e-4);
}

TEST(Kernels, ValueIsHomogeneous) {
  Kernel k = Kernel::isotropic(2, 0.3, true);
  Vec z(2);
  z << 0.3, -0.4;
  double v = k.value(z);
  EXPECT_NEAR(v, normalizing_constant(2, 0.3) * std::pow(0.5, -2.6), 1e-12);
  EXPECT_NEAR(k.value(2.0 * z), v * std::pow(2.0, -2.6), 1e-12);
  EXPECT_DOUBLE_EQ(k.value(-z), v);
}

TEST(Kernels, PatchAnisotropyIsEven) {
  Vec c1(2);
  c1 << 1.0, 0.0;
  Anisotropy a = Anisotropy::patches({c1, unit_vec(2, 1)}, {3.0, 1.0});
  Vec q(2);
  q << std::cos(0.4), std::sin(0.4);
  EXPECT_DOUBLE_EQ(a(q), a(-q));
  EXPECT_GT(a(c1), a(unit_vec(2, 1)));
}

TEST(Kernels, EllipticityCheckFindsViolations) {
  Kernel k(2, 0.5, Anisotropy::constant(2.0), false);
  EXPECT_TRUE(check_ellipticity(k, EllipticityBounds(1.0, 3.0), 64).ok);
  EXPECT_FALSE(check_ellipticity(k, EllipticityBounds(0.5, 1.5), 64).ok);
  EXPECT_THROW(EllipticityBounds(2.0, 1.0), std::invalid_argument);
}

TEST(Kernels, InvalidArgumentsThrow) {
  EXPECT_THROW(Kernel::isotropic(2, 1.0), std::domain_error);
  EXPECT_THROW(Kernel::isotropic(2, 0.0), std::domain_error);
  EXPECT_THROW(Anisotropy::constant(-1.0), std::invalid_argument);
  EXPECT_THROW(Kernel::isotropic(2, 0.5).value(Vec::Zero(2)), std::domain_error);
}

TEST(Kernels, FamilyShape) {
  std::vector<std::vector<Kernel>> m = {{Kernel::isotropic(2, 0.5), Kernel::isotropic(2, 0.5)},
                                        {Kernel::isotropic(2, 0.5), Kernel::isotropic(2, 0.5)}};
  KernelFamily fam(m, EllipticityBounds(0.5, 2.0));
  EXPECT_EQ(fam.rows(), 2u);
  EXPECT_EQ(fam.cols(), 2u);
  EXPECT_DOUBLE_EQ(fam.s(), 0.5);
  std::vector<std::vector<Kernel>> mixed = {{Kernel::isotropic(2, 0.5), Kernel::isotropic(2, 0.4)}};
  EXPECT_THROW(KernelFamily(mixed, EllipticityBounds()), std::invalid_argument);
}
