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

#include <functional>
#include <optional>
#include <vector>

#include "fracblow/fields.hpp"
#include "fracblow/kernels.hpp"

namespace fracblow {

enum class TailMode {
  kAuto,          // analytic for compact support, mapped otherwise
  kAnalyticZero,  // field vanishes beyond R_far (or its support radius)
  kGrowthBound,   // truncate at R_far, fold the growth-bound tail into the error
  kMapped,        // r = B / v maps the tail onto (0, 1]
};

struct QuadratureConfig {
  double r_near = 0.25;
  double R_far = 64.0;
  int near_levels = 16;
  int sphere_order = 64;
  int radial_order = 8;
  TailMode tail_mode = TailMode::kAuto;
  /// Also evaluate at the coarse level and report the difference.
  bool estimate_error = true;

  void validate() const;
  /// Halved levels and orders; the error estimate compares against it.
  QuadratureConfig coarse() const;
  /// Doubled levels and orders.
  QuadratureConfig refined() const;
};

struct EvalResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Directions covering half of the unit sphere (one per antipodal pair)
/// with weights summing to |S^{N-1}| / 2. With an axis, the covered half is
/// {q . axis >= 0} and nodes are graded toward the great circle orthogonal
/// to the axis.
struct DirectionRule {
  std::vector<Vec> q;
  std::vector<double> w;
};
DirectionRule half_sphere_rule(int dim, int order, const std::optional<Vec>& axis);

/// psi(q) = int_0^inf [u(x + r q) + u(x - r q) - 2 u(x)] r^{-1-2s} dr per
/// direction of the rule.
struct DirectionalSamples {
  DirectionRule rule;
  std::vector<double> psi;
  double tail_bound = 0.0;  // bound on the discarded tail per unit angular weight
};

DirectionalSamples sample_directions(const ScalarField& u, const Vec& x, double s, const QuadratureConfig& cfg,
                                     const DirectionRule* rule = nullptr);

/// Samples at cfg and at cfg.coarse(), sharing nothing but the field.
struct SamplePair {
  DirectionalSamples fine;
  std::optional<DirectionalSamples> coarse;
};
SamplePair sample_pair(const ScalarField& u, const Vec& x, double s, const QuadratureConfig& cfg);
/// a A + b B for samples taken on identical rules.
DirectionalSamples combine(double a, const DirectionalSamples& A, double b, const DirectionalSamples& B);
SamplePair combine(double a, const SamplePair& A, double b, const SamplePair& B);

using Reduction = std::function<double(const DirectionalSamples&)>;
/// Applies a reduction to both levels; the error estimate is their gap
/// plus any tail bound scaled by `angular_bound`.
EvalResult reduce(const SamplePair& samples, const Reduction& red, double angular_bound = 0.0);

double reduce_linear(const Kernel& k, const DirectionalSamples& d);
/// Gamma psi_+ - gamma psi_- (plus) or gamma psi_+ - Gamma psi_- (minus).
double reduce_pucci(const EllipticityBounds& b, const DirectionalSamples& d, bool plus);
double reduce_isaacs(const KernelFamily& fam, const DirectionalSamples& d);

EvalResult linear_op(const Kernel& k, const ScalarField& u, const Vec& x, const QuadratureConfig& cfg);
EvalResult frac_laplacian(const ScalarField& u, const Vec& x, double s, const QuadratureConfig& cfg);
EvalResult pucci_plus(const ScalarField& u, const Vec& x, const EllipticityBounds& b, double s,
                      const QuadratureConfig& cfg);
EvalResult pucci_minus(const ScalarField& u, const Vec& x, const EllipticityBounds& b, double s,
                       const QuadratureConfig& cfg);
EvalResult isaacs_op(const KernelFamily& fam, const ScalarField& u, const Vec& x, const QuadratureConfig& cfg);

/// B(f, g)(x) = 1/2 int (f(y) - f(x)) (g(y) - g(x)) K(x - y) dy.
EvalResult bilinear_form(const Kernel& k, const ScalarField& f, const ScalarField& g, const Vec& x,
                         const QuadratureConfig& cfg);

/// Angular moment int_{q_N > 0} a(q) q_N^{2s} dS, including the normalizer.
EvalResult half_space_moment(const Kernel& k, const QuadratureConfig& cfg);

/// c_K(tau) = PV int [(y_N)_+^tau - 1] K(y - e_N) dy for -1 < tau < 2s.
EvalResult c_constant(const Kernel& k, double tau, const QuadratureConfig& cfg);

}  // namespace fracblow
