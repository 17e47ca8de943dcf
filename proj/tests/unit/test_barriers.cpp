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
#include <random>

#include "fracblow/barriers.hpp"

using namespace fracblow;

namespace {

Vec on_circle(double t) {
  Vec x(2);
  x << std::cos(t), std::sin(t);
  return x;
}

}  // namespace

TEST(Modulus, MajorantIsConcaveAndDominatesSamples) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 400; ++i) {
    double t = U(rng);
    pairs.emplace_back(t, std::sqrt(t) * (0.5 + 0.25 * std::sin(7.0 * t)));
  }
  Modulus m = Modulus::from_pairs(pairs, 2.0, 1.1);
  for (auto [t, v] : pairs) EXPECT_GE(m(t), 1.1 * std::abs(v) - 1e-12);
  EXPECT_EQ(m(0.0), 0.0);
  // Concave with m(0) = 0: m(t) <= m(eta) (1 + t / eta).
  EXPECT_LE(m.worst_doubling_gap(60), 1e-12);
  const auto& k = m.knots();
  for (std::size_t i = 1; i < k.size(); ++i) EXPECT_GE(m.knot_values()[i], m.knot_values()[i - 1]);
}

TEST(Modulus, Lipschitz) {
  Modulus m = Modulus::lipschitz(2.0, 3.0);
  EXPECT_DOUBLE_EQ(m(0.5), 1.0);
  EXPECT_DOUBLE_EQ(m(10.0), 6.0);
  EXPECT_FALSE(m.is_zero());
  EXPECT_TRUE(Modulus::lipschitz(0.0, 1.0).is_zero());
}

TEST(Modulus, ProfileModulusVanishesAtZero) {
  Modulus m = Modulus::lipschitz(1.0, 2.0);
  std::vector<double> etas;
  for (int k = 1; k <= 20; ++k) etas.push_back(std::pow(2.0, -k));
  double prev = kInfinity;
  for (double t : {1e-1, 1e-2, 1e-4, 1e-6}) {
    double v = profile_modulus(m, 4.0, t, etas);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Barriers, BoundaryDataExtension) {
  auto disk = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  BoundaryExtension e = extend_boundary_data(disk, [](const Vec& x) { return x[0]; }, 100);
  // |x1 - y1| <= |x - y| on the circle, attained for antipodal-in-x1 pairs.
  EXPECT_GE(e.modulus(0.3), 0.3 - 1e-9);
  EXPECT_LE(e.modulus(0.3), 1.1 * 0.3 + 1e-2);
  Vec x(2);
  x << 0.3, 0.4;
  EXPECT_NEAR(e.ext(x), 0.6, 1e-14);
  EXPECT_NEAR(e.ext(Vec::Zero(2)), 0.0, 1e-12);
}

TEST(Barriers, ConstantDataGetsAPositiveModulus) {
  auto disk = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  BoundaryExtension e = extend_boundary_data(disk, [](const Vec&) { return 2.0; }, 50);
  EXPECT_FALSE(e.modulus.is_zero());
  EXPECT_LT(e.modulus(2.0), 1e-2);
}

TEST(Barriers, BarrierShapeAndEnvelopeOrder) {
  auto disk = std::make_shared<Ball>(Vec::Zero(2), 1.0);
  Modulus m = Modulus::lipschitz(1.0, 2.0);
  FieldPtr w2 = dist_pow_field(disk, 0.3);
  Vec y = on_circle(0.0);
  BarrierFunction V = make_barrier(disk, 0.5, y, 0.25, 1.0, m, w2, 2.0, BarrierType::kUpper);
  BarrierFunction U = make_barrier(disk, 0.5, y, 0.25, 1.0, m, w2, 2.0, BarrierType::kLower);
  EXPECT_DOUBLE_EQ(V.base(), 1.25);
  EXPECT_DOUBLE_EQ(U.base(), 0.75);
  EXPECT_DOUBLE_EQ(V.slope(), 1.0);
  EXPECT_DOUBLE_EQ(V.C2_eta, 2.0);
  Vec x(2);
  x << 0.5, 0.2;
  double d = disk->distance(x);
  double expected = (1.25 + (x - y).norm()) / std::sqrt(d) + 2.0 * std::pow(d, 0.3);
  EXPECT_NEAR(V(x), expected, 1e-12);
  EXPECT_NEAR(V.field()->value(x), expected, 1e-12);
  EXPECT_LT(U(x), V(x));

  BarrierEnvelope env;
  env.members = {V, make_barrier(disk, 0.5, on_circle(kPi), 0.25, -1.0, m, w2, 2.0, BarrierType::kUpper)};
  std::size_t a = env.active(x);
  EXPECT_EQ(envelope_eval(env, x), std::min(env.members[0](x), env.members[1](x)));
  EXPECT_EQ(a, 1u);
  EXPECT_THROW(make_barrier(disk, 0.5, Vec::Zero(2), 0.25, 1.0, m, w2, 2.0, BarrierType::kUpper),
               std::invalid_argument);
}

TEST(Barriers, ConfigValidation) {
  BarrierConfig c;
  EXPECT_NO_THROW(c.validate(0.5));
  c.tau = 1.2;
  EXPECT_THROW(c.validate(0.5), std::invalid_argument);
  c = BarrierConfig();
  c.layer_min = 0.2;
  EXPECT_THROW(c.validate(0.5), std::invalid_argument);
}
