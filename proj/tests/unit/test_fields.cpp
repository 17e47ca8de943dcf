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

#include "fracblow/fields.hpp"

using namespace fracblow;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST(Fields, DistancePowerVanishesOutside) {
  auto b = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  FieldPtr u = dist_pow_field(b, -0.5);
  EXPECT_NEAR(u->value(v2(0.75, 0.0)), 2.0, 1e-14);
  EXPECT_EQ(u->value(v2(1.5, 0.0)), 0.0);
}

TEST(Fields, BallProfile) {
  auto b = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  FieldPtr u = ball_profile_field(b, 0.5);
  EXPECT_NEAR(u->value(v2(0.6, 0.0)), 1.0 / std::sqrt(0.64), 1e-14);
  EXPECT_EQ(u->value(v2(0.0, 2.0)), 0.0);
}

TEST(Fields, HalfspaceMode) {
  Vec p(1);
  p << 2.0;
  FieldPtr u = halfspace_mode_field(p, 0.5);
  EXPECT_NEAR(u->value(v2(0.5, 0.25)), 2.0 * 0.5 * 2.0, 1e-14);
  EXPECT_EQ(u->value(v2(0.5, -0.25)), 0.0);
}

TEST(Fields, WindowedQuadraticAgreesInsideTheWindow) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2, 2);
  Q(0, 0) = 1.0;
  FieldPtr u = windowed_quadratic_field(Vec::Zero(2), Q, 1.0);
  EXPECT_NEAR(u->value(v2(0.1, 0.2)), 0.01, 1e-14);
  EXPECT_EQ(u->value(v2(3.0, 0.0)), 0.0);
}

TEST(Fields, Combinators) {
  FieldPtr a = affine_field(v2(1.0, 2.0), 0.5);
  FieldPtr c = constant_field(2, 3.0);
  Vec x = v2(0.25, -1.0);
  EXPECT_DOUBLE_EQ(a->value(x), 0.25 - 2.0 + 0.5);
  EXPECT_DOUBLE_EQ(product_field(a, c)->value(x), 3.0 * a->value(x));
  EXPECT_DOUBLE_EQ(linear_combination(2.0, a, -1.0, c)->value(x), 2.0 * a->value(x) - 3.0);
  EXPECT_DOUBLE_EQ(translated_field(a, v2(1.0, 0.0))->value(x), a->value(x - v2(1.0, 0.0)));
}

TEST(Fields, NamedBuiltIns) {
  auto b = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  EXPECT_EQ(field_from_spec("indicator", b, 0.5)->value(v2(0.2, 0.2)), 1.0);
  EXPECT_NEAR(field_from_spec("dist-pow:0.5", b, 0.5)->value(v2(0.0, 0.75)), 0.5, 1e-14);
  EXPECT_NEAR(field_from_spec("halfspace-mode:1", b, 0.5)->value(v2(2.0, 0.25)), 4.0, 1e-14);
  EXPECT_THROW(field_from_spec("dist-pow:x", b, 0.5), std::invalid_argument);
  EXPECT_THROW(field_from_spec("nonsense", b, 0.5), std::invalid_argument);
}
