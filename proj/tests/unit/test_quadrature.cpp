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

#include "fracblow/quadrature.hpp"

using namespace fracblow::quad;

TEST(Quadrature, GaussLegendreIsExactForPolynomials) {
  for (int n : {2, 5, 8, 16}) {
    const GaussRule& r = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double sum = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * std::pow(r.nodes[i], deg);
      double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << "n=" << n << " deg=" << deg;
    }
  }
}

TEST(Quadrature, GradedRuleHandlesEndpointSingularity) {
  // int_0^1 t^{-1/2} dt = 2.
  double v = integrate_toward_zero([](double t) { return 1.0 / std::sqrt(t); }, 1.0, 40, 8);
  EXPECT_NEAR(v, 2.0, 1e-9);
  double w = integrate_graded([](double t) { return std::pow(t * (1.0 - t), -0.3); }, 0.0, 1.0, 40, 8);
  EXPECT_NEAR(w, std::pow(std::tgamma(0.7), 2) / std::tgamma(1.4), 1e-8);
}

TEST(Quadrature, CompositeRule) {
  EXPECT_NEAR(integrate_composite([](double t) { return std::sin(t); }, 0.0, M_PI, 8, 6), 2.0, 1e-12);
}

TEST(Quadrature, LineFitRecoversSlope) {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(3.0 - 1.5 * i);
  }
  LineFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, -1.5, 1e-13);
  EXPECT_NEAR(f.intercept, 3.0, 1e-12);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
}
