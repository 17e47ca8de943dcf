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
#include <string>
#include <vector>

#include "fracblow/fields.hpp"
#include "fracblow/kernels.hpp"
#include "fracblow/nonlocal_eval.hpp"

namespace fracblow {

using PointFunction = std::function<double(const Vec&)>;

// ---------------------------------------------------------------- profile

struct ProfileRay {
  Vec x0;
  double h0 = 0.0;
  std::vector<double> distances;     // strictly decreasing
  std::vector<double> renormalized;  // d^{1-s} u
  std::vector<double> errors;        // |d^{1-s} u - h(x0)|
};

struct ProfileReport {
  std::vector<ProfileRay> rays;
  std::vector<std::string> warnings;
  double smallest_distance = 0.0;
  double max_error_at_smallest = 0.0;
  /// Same, divided by |h(x0)| (only rays with h(x0) != 0).
  double max_relative_error_at_smallest = 0.0;
  /// Slope of log(max error over rays) against log d.
  double fitted_exponent = 0.0;
};

/// Samples d^{1-s} u along inward normals at `anchors`. Distances below
/// `min_distance` (the prescribed layer) are dropped with a warning.
ProfileReport boundary_profile(const PointFunction& u, const Domain& dom, double s, const PointFunction& h,
                               const std::vector<Vec>& anchors, std::vector<double> distances,
                               double min_distance = 0.0);

// ---------------------------------------------------------------- rates

struct RateReport {
  std::vector<double> d, grad;
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
  double band_lo = 0.0, band_hi = 0.0;  // slope -+ 2 stderr
  double decades = 0.0;
  /// True when the samples span at least 1.5 decades of distance.
  bool spans_required_decades = false;
};

/// Least-squares slope of log|Du| against log d on points x0 + d n(x0),
/// d geometric in [d_min, d_max]. The gradient is a centered difference
/// with step step_fn(x) (default d/100). Throws NumericalFailure with fewer
/// than 10 valid samples.
RateReport gradient_rate(const PointFunction& u, const Domain& dom, double d_min, double d_max,
                         const std::vector<Vec>& anchors, int samples_per_ray = 12,
                         const std::function<double(const Vec&)>& step_fn = {});

Vec centered_gradient(const PointFunction& u, const Vec& x, double step);

// ---------------------------------------------------------------- rescaling

struct RescaledMember {
  Vec z;          // boundary base point
  double d = 0.0;
  /// v(y) = d^{1-s} u(z + d R y), R the boundary frame at z (y_N inward).
  PointFunction v;
  double v_at_eN = 0.0;
  Vec grad_at_eN;
};

std::vector<RescaledMember> rescaled_family(const PointFunction& u, const Domain& dom, double s,
                                            const std::vector<Vec>& base_points, const std::vector<double>& d);

// ---------------------------------------------------------------- product formula

struct ProductFormulaReport {
  Vec x0, z;
  std::vector<double> rho, values, errors, ratios;  // ratio = L / (xi(x) rho^{tau-2s})
  double c_expected = 0.0;  // c_K(tau)
  double limit = 0.0;       // extrapolated ratio at rho = 0
  double residual_slope = 0.0;
  std::vector<double> exponents;
};

/// Evaluates L_K(d^tau |. - x0|^alpha) at z + rho n(z) for boundary points
/// z, x0 and extrapolates the ratio to rho = 0 by least squares in
/// c + sum_k a_k rho^{p_k}. Without explicit exponents the fit uses
/// p = {2s - tau, 1}: boundary curvature perturbs d^tau at relative order
/// rho^{2s - tau}, the smooth factor at order rho.
ProductFormulaReport product_formula_check(const Kernel& k, DomainPtr dom, double tau, double alpha,
                                           const Vec& x0, const Vec& z, std::vector<double> rho,
                                           const QuadratureConfig& cfg, std::vector<double> exponents = {});

// ---------------------------------------------------------------- indicator

struct IndicatorReport {
  std::vector<Vec> points;
  std::vector<double> values, errors;
  std::vector<double> oracle;  // -Gamma times the exterior kernel mass (every psi is <= 0)
  bool all_negative = false;
  double fitted_c = 0.0;       // min over points of -value * diam^{2s}
  double max_oracle_rel_error = 0.0;
};

/// Exterior integral int_{complement} |x - y|^{-N-2s} dy by angular
/// quadrature of r*(q)^{-2s} / (2s), r* the exit distance along q.
double exterior_kernel_mass(const Domain& dom, const Vec& x, double s, int directions = 4096);

IndicatorReport indicator_check(DomainPtr dom, const EllipticityBounds& b, double s, const std::vector<Vec>& points,
                                const QuadratureConfig& cfg);

// ---------------------------------------------------------------- s -> 1

struct LimitCoefficients {
  std::vector<double> s_values;
  std::vector<std::vector<double>> A;  // A[m][k] = C_{N,s}/(2-2s) int q_k^2 a dS at s_values[m]
  std::vector<double> limit;           // extrapolated to s = 1
  /// limit / 2: the coefficient of u_kk in the limiting operator.
  std::vector<double> operator_coefficient;
};

/// Polynomial extrapolation in 1 - s through all points of the sequence.
LimitCoefficients limit_coefficients(const Anisotropy& a, int dim, const std::vector<double>& s_values,
                                     int sphere_order = 128);

/// Five-point Laplacian of u at x with step h.
double fd_laplacian(const PointFunction& u, const Vec& x, double h);

// ---------------------------------------------------------------- half-space

struct HalfspaceRow {
  Vec x;
  EvalResult direct, refined;
  double decay = 0.0;  // error ratio coarse / refined
  EvalResult decomposition;  // (p'.x') Delta^s x_N^{s-1} + 2 B(p'.x', x_N^{s-1})
  bool within_estimate = false;
  bool decomposition_agrees = false;
};

struct HalfspaceReport {
  std::vector<HalfspaceRow> rows;
  Vec gradient_point;
  Vec gradient_fd, gradient_exact;
  bool all_within = false, all_decay = false, all_agree = false;
};

/// Default points: x' p'-aligned away from the zero set, x_N in [0.1, 1].
HalfspaceReport halfspace_checks(const Vec& p_tangential, double s, const QuadratureConfig& cfg,
                                 std::vector<Vec> points = {});

}  // namespace fracblow
