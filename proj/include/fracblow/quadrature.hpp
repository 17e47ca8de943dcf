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

#include <cmath>
#include <utility>
#include <vector>

namespace fracblow::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule (thread-safe after first use of each order).
const GaussRule& gauss_legendre(int n);

/// Integral of g over [0, width] with `levels` dyadic shells accumulating at
/// 0, each integrated by an `order`-point Gauss rule. g receives the exact
/// distance from the accumulation point. The innermost remainder
/// [0, width 2^-levels] is estimated by continuing the geometric decay of
/// the last two shell integrals, which is exact for power laws t^p, p > -1.
template <class G>
double integrate_toward_zero(const G& g, double width, int levels, int order) {
  if (!(width > 0.0)) return 0.0;
  const GaussRule& rule = gauss_legendre(order);
  double total = 0.0, prev = 0.0, last = 0.0;
  double hi = width;
  for (int k = 0; k < levels; ++k) {
    double lo = 0.5 * hi;
    double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double shell = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) shell += rule.weights[i] * g(mid + half * rule.nodes[i]);
    shell *= half;
    total += shell;
    prev = last;
    last = shell;
    hi = lo;
  }
  if (levels >= 2 && prev != 0.0) {
    double ratio = last / prev;
    if (ratio > 0.0 && ratio < 0.95) total += last * ratio / (1.0 - ratio);
  }
  return total;
}

/// Integral over [a, b] graded toward both endpoints: each half is split
/// into dyadic shells accumulating at its outer endpoint.
template <class F>
double integrate_graded(const F& f, double a, double b, int levels, int order) {
  if (!(b > a)) return 0.0;
  double half = 0.5 * (b - a);
  double left = integrate_toward_zero([&](double t) { return f(a + t); }, half, levels, order);
  double right = integrate_toward_zero([&](double t) { return f(b - t); }, half, levels, order);
  return left + right;
}

/// Composite Gauss rule with `panels` equal panels.
template <class F>
double integrate_composite(const F& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  double h = (b - a) / panels, total = 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h, mid = lo + 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * acc;
  }
  return total;
}

/// Nodes/weights of integrate_graded, for callers that accumulate weights
/// rather than values (no remainder extrapolation).
std::vector<std::pair<double, double>> graded_nodes(double a, double b, int levels, int order,
                                                    bool grade_left, bool grade_right);

/// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fracblow::quad
