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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracblow/geometry.hpp"
#include "fracblow/types.hpp"

namespace fracblow {

/// Behaviour at infinity. Compactly supported fields vanish outside the
/// ball B(center, radius); the others satisfy |u(y)| <= M (1 + |y|)^p with
/// p < 2s, i.e. they belong to the weighted space L^1_omega.
struct Integrability {
  bool compact = true;
  Vec center;
  double radius = 0.0;
  double M = 0.0;
  double p = 0.0;
};

/// A function on all of R^N together with the metadata the quadrature
/// needs: where it is C^2, where rays through a point meet its singular
/// set, and how it behaves at infinity.
class ScalarField {
 public:
  struct Parts {
    int dim = 0;
    std::string name;
    std::function<double(const Vec&)> value;
    /// Radius of a ball around x on which the field is C^2 (0: not smooth).
    std::function<double(const Vec&)> smooth_radius;
    /// Ray parameters r > 0 where x + r q meets the singular set.
    std::function<std::vector<double>(const Vec&, const Vec&)> breakpoints;
    /// Normal of a nearby (locally) flat singular set, if any; directions
    /// orthogonal to it need angular grading.
    std::function<std::optional<Vec>(const Vec&)> critical_axis;
    Integrability integrability;
  };

  explicit ScalarField(Parts parts);

  int dim() const { return parts_.dim; }
  const std::string& name() const { return parts_.name; }
  double operator()(const Vec& x) const { return parts_.value(x); }
  double value(const Vec& x) const { return parts_.value(x); }
  double smooth_radius(const Vec& x) const { return parts_.smooth_radius(x); }
  std::vector<double> breakpoints(const Vec& x, const Vec& q) const;
  std::optional<Vec> critical_axis(const Vec& x) const;
  const Integrability& integrability() const { return parts_.integrability; }
  const Parts& parts() const { return parts_; }

 private:
  Parts parts_;
};

using FieldPtr = std::shared_ptr<const ScalarField>;

FieldPtr constant_field(int dim, double c);
/// x -> p . x + c (not in L^1_omega for s <= 1/2; the symmetrized quadrature
/// still annihilates it exactly).
FieldPtr affine_field(const Vec& p, double c = 0.0);
/// d^tau with the exterior convention (0 outside).
FieldPtr dist_pow_field(DomainPtr dom, double tau);
/// x -> phi(d(x)) inside the domain and 0 outside; phi must be C^2 on (0, inf).
FieldPtr dist_function_field(DomainPtr dom, std::function<double(double)> phi, std::string name);
FieldPtr indicator_field(DomainPtr dom);
/// (R^2 - |x - c|^2)_+^{s-1}; s-harmonic in the ball for the normalized
/// fractional Laplacian up to a constant factor R^{...}.
FieldPtr ball_profile_field(std::shared_ptr<const Ball> ball, double s);
/// (x_N)_+^tau in R^N.
FieldPtr halfspace_power_field(int dim, double tau);
/// (p' . x') (x_N)_+^{s-1}.
FieldPtr halfspace_mode_field(const Vec& p_tangential, double s);
FieldPtr gaussian_field(const Vec& center, double sigma);
/// (x - c)^T Q (x - c) times a C-infinity cutoff equal to 1 on B(c, R) and
/// 0 outside B(c, 2R).
FieldPtr windowed_quadratic_field(const Vec& center, const Eigen::MatrixXd& Q, double R);
/// |x - x0|^alpha.
FieldPtr radial_power_field(const Vec& x0, double alpha);
/// x -> u(x - shift).
FieldPtr translated_field(FieldPtr u, const Vec& shift);
/// x -> u(lambda x).
FieldPtr scaled_field(FieldPtr u, double lambda);
FieldPtr product_field(FieldPtr f, FieldPtr g);
/// a f + b g.
FieldPtr linear_combination(double a, FieldPtr f, double b, FieldPtr g);

/// Builds a named built-in field: dist-pow:TAU, ball-profile, halfspace-profile[:TAU],
/// indicator, gaussian, halfspace-mode:P1[,P2], constant:C. Throws std::invalid_argument.
FieldPtr field_from_spec(const std::string& spec, DomainPtr dom, double s);

/// Normal at the nearest boundary point when x is close to the boundary
/// relative to the domain size; used as the angular grading axis.
std::optional<Vec> boundary_axis_near(const Domain& dom, const Vec& x);

}  // namespace fracblow
