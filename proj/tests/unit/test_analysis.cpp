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

#include "fracblow/analysis.hpp"

using namespace fracblow;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST(Analysis, FiniteDifferenceLaplacian) {
  auto u = [](const Vec& x) { return x[0] * x[0] + 3.0 * x[1] * x[1] + x[0] * x[1]; };
  EXPECT_NEAR(fd_laplacian(u, v2(0.3, -0.2), 1e-3), 8.0, 1e-6);
}

TEST(Analysis, GradientRateOfAPurePower) {
  Ball disk(Vec::Zero(2), 1.0);
  auto u = [&disk](const Vec& x) { return std::pow(disk.distance(x), -0.7); };
  RateReport r = gradient_rate(u, disk, 1e-3, 1e-1, disk.sample_boundary(4), 12);
  EXPECT_NEAR(r.slope, -1.7, 1e-3);
  EXPECT_TRUE(r.spans_required_decades);
  EXPECT_LE(r.band_lo, r.slope);
  EXPECT_GE(r.band_hi, r.slope);
  EXPECT_THROW(gradient_rate(u, disk, 1e-3, 1e-1, disk.sample_boundary(1), 5), NumericalFailure);
}

TEST(Analysis, BoundaryProfileOfTheExactSolution) {
  auto disk = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  FieldPtr u = ball_profile_field(disk, 0.5);
  auto h = [](const Vec&) { return std::sqrt(0.5); };
  ProfileReport r = boundary_profile([&u](const Vec& x) { return u->value(x); }, *disk, 0.5, h,
                                     disk->sample_boundary(6), {0.1, 0.01, 0.001, 0.0001}, 0.005);
  ASSERT_EQ(r.rays.size(), 6u);
  EXPECT_EQ(r.rays[0].distances.size(), 2u);
  EXPECT_EQ(r.warnings.size(), 2u);
  EXPECT_DOUBLE_EQ(r.smallest_distance, 0.01);
  // d^{1/2} (d (2 - d))^{-1/2} = (2 - d)^{-1/2}.
  EXPECT_NEAR(r.max_error_at_smallest, std::abs(1.0 / std::sqrt(1.99) - std::sqrt(0.5)), 1e-12);
}

TEST(Analysis, ExteriorKernelMassAtTheCenter) {
  // int_{|y| > 1} |y|^{-2-2s} dy = pi / s in the plane.
  Ball disk(Vec::Zero(2), 1.0);
  EXPECT_NEAR(exterior_kernel_mass(disk, Vec::Zero(2), 0.5), 2.0 * kPi, 1e-10);
  EXPECT_NEAR(exterior_kernel_mass(disk, Vec::Zero(2), 0.25), 4.0 * kPi, 1e-10);
}

TEST(Analysis, RescaledFamilyOfAFlatProfile) {
  auto disk = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  auto u = [&disk](const Vec& x) { return std::pow(disk->distance(x), -0.5); };
  auto fam = rescaled_family(u, *disk, 0.5, {v2(1.0, 0.0), v2(0.0, -1.0)}, {0.1, 0.01});
  ASSERT_EQ(fam.size(), 2u);
  for (const RescaledMember& m : fam) EXPECT_NEAR(m.v_at_eN, 1.0, 1e-12);
}

TEST(Analysis, LimitCoefficientsOfTheIsotropicKernel) {
  LimitCoefficients lc = limit_coefficients(Anisotropy::constant(1.0), 2, {0.9, 0.95, 0.99});
  ASSERT_EQ(lc.limit.size(), 2u);
  EXPECT_NEAR(lc.operator_coefficient[0], 1.0, 1e-3);
  EXPECT_NEAR(lc.operator_coefficient[1], 1.0, 1e-3);
}
