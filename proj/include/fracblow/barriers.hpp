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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracblow/fields.hpp"
#include "fracblow/kernels.hpp"
#include "fracblow/nonlocal_eval.hpp"

namespace fracblow {

/// Piecewise-linear, concave, nondecreasing modulus of continuity on
/// [0, diameter] with m(0) = 0. Concavity gives m(t) <= m(eta)(1 + t/eta).
class Modulus {
 public:
  Modulus() = default;
  /// Least concave majorant of the sample pairs (distance, oscillation),
  /// multiplied by `inflation`.
  static Modulus from_pairs(const std::vector<std::pair<double, double>>& pairs, double diameter,
                            double inflation = 1.0);
  static Modulus lipschitz(double L, double diameter);

  double operator()(double t) const;
  bool is_zero() const;
  double diameter() const { return diameter_; }
  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& knot_values() const { return m_; }
  /// max of m(t) - m(eta)(1 + t/eta) over an n x n grid of (t, eta) in (0, diameter].
  double worst_doubling_gap(int n) const;

 private:
  std::vector<double> t_{0.0}, m_{0.0};
  double diameter_ = 0.0;
};

/// inf over eta in etas of m(eta) + 2 (1 + C2) (m(eta)/eta) t^alpha.
double profile_modulus(const Modulus& m, double C2, double t, const std::vector<double>& etas,
                       double alpha = 0.9);

using BoundaryFunction = std::function<double(const Vec&)>;

struct BoundaryExtension {
  BoundaryFunction h;    // the data on the boundary
  BoundaryFunction ext;  // h(project(x)) near the boundary, constant further in
  Modulus modulus;
};

/// Fits the modulus from all pairs of `samples` quasi-uniform boundary points.
BoundaryExtension extend_boundary_data(DomainPtr dom, BoundaryFunction h, int samples = 200,
                                       double inflation = 1.1);

/// Which Pucci-type operator certifies a barrier: the extremal operators of
/// `bounds`, or the Isaacs operator of a family when one is given.
struct OperatorSpec {
  double s = 0.5;
  EllipticityBounds bounds;
  std::optional<KernelFamily> family;

  /// M^+ (supersolution side) or M^- (subsolution side); the family ignores the side.
  EvalResult reduce(const SamplePair& samples, bool super) const;
};

struct CertificationPoint {
  Vec x;
  double value = 0.0;
  double error = 0.0;
  double required = 0.0;  // value + error <= -required (super), value - error >= required (sub)
  double slack = 0.0;     // distance to failure, negative when failing
  bool pass = false;
};

struct CertificationReport {
  std::string label;
  std::vector<CertificationPoint> points;
  bool passed = false;
  std::size_t failures = 0;
  double worst_slack = 0.0;  // most negative slack; >= 0 when all pass
  std::size_t worst_index = 0;
  double coefficient = 0.0;  // A for w1, scale for w2, C2 for barriers
  int attempts = 0;

  void finalize();
};

CertificationReport verify_supersolution(const ScalarField& field, const OperatorSpec& op,
                                         const std::vector<Vec>& points,
                                         const std::function<double(const Vec&)>& margin_fn,
                                         const QuadratureConfig& cfg, bool supersolution = true);

struct BarrierConfig {
  EllipticityBounds bounds{1.0, 2.0};
  double tau = 0.3;
  double beta = 0.2;
  double delta0 = 0.0;        // blend radius of w2; 0 means inradius / 4
  int anchors = 64;
  int eta_levels = 8;         // eta = 2^-k, k = 1..eta_levels
  int cert_points = 200;
  double margin = 0.1;        // required value is (1 + margin) times the target
  double layer_min = 0.01;    // certification band {layer_min <= d <= layer_max}
  double layer_max = 0.1;
  int max_doublings = 24;
  int max_retries = 3;
  int modulus_samples = 200;
  double holder_alpha = 0.9;
  std::uint64_t seed = 7;
  QuadratureConfig quad;

  void validate(double s) const;
};

struct CertifiedField {
  FieldPtr field;
  double coefficient = 0.0;
  double exponent = 0.0;
  CertificationReport report;
};

/// w1 = A d^beta with pucci_plus(w1) <= -1 at interior samples.
CertifiedField build_w1(DomainPtr dom, double s, double beta, const BarrierConfig& cfg);
/// w2 = S (phi(d) + kappa w1), phi(d) = d^tau blended into a constant over
/// {delta0/2 < d < delta0}; pucci_plus(w2) <= -d^{tau-2s} on the layer
/// samples and <= 0 further in.
CertifiedField build_w2(DomainPtr dom, double s, double tau, const CertifiedField& w1, const BarrierConfig& cfg);

enum class BarrierType { kUpper, kLower };

/// (h(y) + m(eta) + m(eta)/eta |x - y|) d_+^{s-1} + C2_eta w2 for the upper
/// type, and the mirror image for the lower type.
struct BarrierFunction {
  DomainPtr dom;
  double s = 0.5;
  Vec y;
  double eta = 0.5;
  double h_y = 0.0;
  double m_eta = 0.0;
  double C2_eta = 0.0;
  FieldPtr w2;
  BarrierType type = BarrierType::kUpper;

  double base() const { return type == BarrierType::kUpper ? h_y + m_eta : h_y - m_eta; }
  double slope() const { return m_eta / eta; }
  double operator()(const Vec& x) const;
  /// The profile part (everything except the w2 term) as a field.
  FieldPtr profile_field() const;
  FieldPtr field() const;
};

BarrierFunction make_barrier(DomainPtr dom, double s, const Vec& y, double eta, double h_y, const Modulus& m,
                             FieldPtr w2, double C2, BarrierType type);

struct BarrierEnvelope {
  std::vector<BarrierFunction> members;
  BarrierType mode = BarrierType::kUpper;  // upper: inf (V); lower: sup (U)

  std::size_t active(const Vec& x) const;
};
double envelope_eval(const BarrierEnvelope& env, const Vec& x);

/// Everything needed to build V and U for given data.
struct BarrierSet {
  DomainPtr dom;
  double s = 0.5;
  BoundaryExtension data;
  CertifiedField w1, w2;
  std::vector<Vec> anchors;
  std::vector<double> etas;
  double C2 = 1.0;

  BarrierEnvelope envelope(BarrierType type) const;
};

BarrierSet build_barrier_set(DomainPtr dom, double s, BoundaryFunction h, const BarrierConfig& cfg);

struct BarrierCertification {
  double C2 = 0.0;
  int doublings = 0;
  CertificationReport upper, lower;
  bool passed = false;
};

/// Certifies V and U at the points by checking the active member of each
/// envelope: pucci_plus(V_y) <= -(1 + margin) C2_eta/2 d^{tau-2s} and the
/// mirror inequality for U. C2 doubles from its current value until both
/// pass or the doubling budget runs out; set.C2 is updated.
BarrierCertification certify_barriers(BarrierSet& set, const std::vector<Vec>& points, const BarrierConfig& cfg);

}  // namespace fracblow
