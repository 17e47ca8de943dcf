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

#include "fracblow/geometry.hpp"

using namespace fracblow;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST(Geometry, BallDistanceAndProjection) {
  Ball b(v2(1.0, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(b.distance(v2(1.0, 0.5)), 1.5);
  EXPECT_DOUBLE_EQ(b.distance(v2(5.0, 0.0)), 0.0);
  Vec p = b.project(v2(1.0, 0.5));
  EXPECT_NEAR((p - v2(1.0, 2.0)).norm(), 0.0, 1e-14);
  EXPECT_NEAR((b.inward_normal(p) - v2(0.0, -1.0)).norm(), 0.0, 1e-14);
  EXPECT_THROW(b.project(v2(1.0, 0.0)), NonUniqueProjection);
}

TEST(Geometry, BallRayCrossings) {
  Ball b(Vec::Zero(2), 1.0);
  auto c = b.ray_boundary_crossings(v2(-2.0, 0.0), v2(1.0, 0.0));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.0, 1e-12);
  EXPECT_NEAR(c[1], 3.0, 1e-12);
  EXPECT_NEAR(b.ray_level_exit(Vec::Zero(2), v2(0.0, 1.0), 0.25), 0.75, 1e-12);
}

TEST(Geometry, HalfSpace) {
  HalfSpace h(v2(0.0, 1.0), 0.5, 10.0);
  EXPECT_TRUE(h.inside(v2(3.0, 1.0)));
  EXPECT_DOUBLE_EQ(h.distance(v2(3.0, 1.25)), 0.75);
  EXPECT_NEAR((h.project(v2(3.0, 2.0)) - v2(3.0, 0.5)).norm(), 0.0, 1e-14);
  EXPECT_TRUE(std::isinf(h.reach()));
}

TEST(Geometry, SuperellipseWithExponentTwoIsTheDisk) {
  Superellipse s(1.0, 1.0, 2.0);
  Ball b(Vec::Zero(2), 1.0);
  for (Vec x : {v2(0.3, 0.1), v2(-0.5, 0.6), v2(0.0, -0.95)}) {
    EXPECT_NEAR(s.distance(x), b.distance(x), 1e-9);
    EXPECT_NEAR((s.project(x) - b.project(x)).norm(), 0.0, 1e-7);
  }
  EXPECT_NEAR(s.perimeter(), 2.0 * kPi, 1e-5);
  EXPECT_NEAR(s.reach(), 1.0, 1e-3);
}

TEST(Geometry, SuperellipseCornerRegion) {
  Superellipse s(1.0, 1.0, 4.0);
  EXPECT_NEAR(s.distance(v2(0.0, 0.5)), 0.5, 1e-9);
  EXPECT_LT(s.reach(), 1.0);
  Vec p = s.project(v2(0.6, 0.6));
  EXPECT_NEAR(std::pow(p[0], 4) + std::pow(p[1], 4), 1.0, 1e-9);
  // The center has four nearest boundary points.
  EXPECT_THROW(s.project(Vec::Zero(2)), NonUniqueProjection);
}

TEST(Geometry, BoundaryFrameIsOrthonormal) {
  Ball b(Vec::Zero(2), 1.0);
  Vec x0 = v2(std::cos(0.7), std::sin(0.7));
  BoundaryFrame f = b.boundary_frame(x0);
  EXPECT_NEAR(f.normal().dot(f.tangent(0)), 0.0, 1e-14);
  EXPECT_NEAR((f.normal() + x0).norm(), 0.0, 1e-14);
  EXPECT_NEAR((f.to_global(v2(0.0, 0.25)) - 0.75 * x0).norm(), 0.0, 1e-14);
  EXPECT_THROW(b.boundary_frame(v2(0.5, 0.0)), std::domain_error);
}

TEST(Geometry, InteriorSamplesAreReproducible) {
  Ball b(Vec::Zero(2), 1.0);
  auto a = b.sample_interior(50, 11, 0.01, 0.1);
  auto c = b.sample_interior(50, 11, 0.01, 0.1);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i], c[i]);
    double d = b.distance(a[i]);
    EXPECT_GE(d, 0.01);
    EXPECT_LE(d, 0.1);
  }
}
