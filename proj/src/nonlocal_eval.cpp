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

#include "fracblow/nonlocal_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Geometry>

#include "fracblow/quadrature.hpp"

namespace fracblow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below r0 / 2^17 the second difference is dominated by cancellation.
constexpr int kMaxNearLevels = 17;
constexpr int kMaxSegmentLevels = 40;

// Near field: int_0^r0 delta(r) r^{-1-2s} dr for delta(r) ~ A r^2. Dyadic
// shells down to r_min; the remaining [0, r_min] uses A estimated from the
// innermost shell, which stays accurate as s -> 1 where the integral
// converges only like r^{2-2s}.
template <class F>
double near_field(const F& delta, double r0, double s, int levels, int order) {
  const quad::GaussRule& rule = quad::gauss_legendre(order);
  levels = std::clamp(levels, 1, kMaxNearLevels);
  double hi = r0, total = 0.0, last = 0.0, lo = r0;
  for (int k = 0; k < levels; ++k) {
    lo = 0.5 * hi;
    double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo), shell = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      double r = mid + half * rule.nodes[i];
      shell += rule.weights[i] * delta(r) * std::pow(r, -1.0 - 2.0 * s);
    }
    last = shell * half;
    total += last;
    hi = lo;
  }
  const double e = 2.0 - 2.0 * s;
  double moment = (std::pow(2.0 * lo, e) - std::pow(lo, e)) / e;
  double A = last / moment;
  return total + A * std::pow(lo, e) / e;
}

// Everything a ray integral needs beyond the integrand itself.
struct RayPlan {
  double r0 = 0.0;
  TailMode mode = TailMode::kMapped;
  double R_end = kInf;      // for analytic / truncated tails
  double tail_bound = 0.0;  // truncated tails only
};

// psi = int_0^inf full(r) r^{-1-2s} dr where full = var + c_const and var
// is what remains of the integrand far away.
template <class Full, class Var>
double ray_integral(const Full& full, const Var& var, double c_const, double s, const RayPlan& plan,
                    std::vector<double> bps, int levels, int order) {
  const double p = -1.0 - 2.0 * s;
  double acc = near_field(full, plan.r0, s, levels, order);
  int seg_levels = std::min(levels, kMaxSegmentLevels);
  bps.erase(std::remove_if(bps.begin(), bps.end(), [&](double b) { return b <= plan.r0 * (1.0 + 1e-12); }),
            bps.end());
  double end;
  if (plan.mode == TailMode::kMapped) {
    end = 2.0 * std::max(plan.r0, bps.empty() ? plan.r0 : bps.back());
  } else {
    end = plan.R_end;
    bps.erase(std::remove_if(bps.begin(), bps.end(), [&](double b) { return b >= end; }), bps.end());
  }
  auto f = [&](double r) { return full(r) * std::pow(r, p); };
  double a = plan.r0;
  for (double b : bps) {
    acc += quad::integrate_graded(f, a, b, seg_levels, order);
    a = b;
  }
  acc += quad::integrate_graded(f, a, end, seg_levels, order);
  double scale = std::pow(end, -2.0 * s);
  acc += c_const * scale / (2.0 * s);
  if (plan.mode == TailMode::kMapped) {
    auto g = [&](double v) { return var(end / v) * std::pow(v, 2.0 * s - 1.0); };
    acc += scale * quad::integrate_graded(g, 0.0, 1.0, seg_levels, order);
  }
  return acc;
}

struct RayProblem {
  int dim = 0;
  double smooth_radius = 0.0;
  std::function<std::vector<double>(const Vec&)> breakpoints;  // for direction q (both signs merged)
  std::function<double(const Vec&, double)> full;
  std::function<double(const Vec&, double)> var;
  double c_const = 0.0;
  Integrability integrability;
};

DirectionalSamples sample_rays(const RayProblem& pb, const Vec& x, double s, const QuadratureConfig& cfg,
                               const DirectionRule& rule) {
  if (!(pb.smooth_radius > 0.0))
    throw std::domain_error("PV undefined: the field is not C^2 near the evaluation point");
  RayPlan plan;
  plan.r0 = std::min(cfg.r_near, 0.5 * pb.smooth_radius);
  TailMode mode = cfg.tail_mode;
  const Integrability& in = pb.integrability;
  if (mode == TailMode::kAuto) mode = in.compact ? TailMode::kAnalyticZero : TailMode::kMapped;
  plan.mode = mode;
  if (mode == TailMode::kAnalyticZero) {
    if (!in.compact) throw std::invalid_argument("analytic_zero tail requires a compactly supported field");
    plan.R_end = std::max((x - in.center).norm() + in.radius, 2.0 * plan.r0) * (1.0 + 1e-12);
  } else if (mode == TailMode::kGrowthBound) {
    double R = std::max({cfg.R_far, 1.0 + x.norm(), 2.0 * plan.r0});
    plan.R_end = R;
    if (in.compact) {
      plan.R_end = std::max(R, (x - in.center).norm() + in.radius);
    } else {
      if (!(in.p < 2.0 * s)) throw std::domain_error("growth exponent must be below 2s for L^1_omega");
      plan.tail_bound = 2.0 * in.M * std::pow(2.0, in.p) * std::pow(R, in.p - 2.0 * s) / (2.0 * s - in.p);
    }
  }
  DirectionalSamples out;
  out.rule = rule;
  out.psi.resize(rule.q.size());
  out.tail_bound = plan.tail_bound;
  for (std::size_t k = 0; k < rule.q.size(); ++k) {
    const Vec& q = rule.q[k];
    auto full = [&](double r) { return pb.full(q, r); };
    auto var = [&](double r) { return pb.var(q, r); };
    out.psi[k] = ray_integral(full, var, pb.c_const, s, plan, pb.breakpoints(q), cfg.near_levels, cfg.radial_order);
  }
  return out;
}

std::vector<double> both_ways(const ScalarField& u, const Vec& x, const Vec& q) {
  std::vector<double> a = u.breakpoints(x, q), b = u.breakpoints(x, -q);
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  return a;
}

RayProblem linear_problem(const ScalarField& u, const Vec& x) {
  RayProblem pb;
  pb.dim = u.dim();
  pb.smooth_radius = u.smooth_radius(x);
  const double ux = u(x);
  pb.breakpoints = [&u, x](const Vec& q) { return both_ways(u, x, q); };
  pb.full = [&u, x, ux](const Vec& q, double r) { return u(x + r * q) + u(x - r * q) - 2.0 * ux; };
  pb.var = [&u, x](const Vec& q, double r) { return u(x + r * q) + u(x - r * q); };
  pb.c_const = -2.0 * ux;
  pb.integrability = u.integrability();
  return pb;
}

void check_point(const ScalarField& u, const Vec& x, double s) {
  if (x.size() != u.dim()) throw std::invalid_argument("evaluation point has the wrong dimension");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("s must lie in (0, 1)");
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(r_near > 0.0 && r_near < R_far)) throw std::invalid_argument("quadrature: need 0 < r_near < R_far");
  if (near_levels < 1 || sphere_order < 1 || radial_order < 1)
    throw std::invalid_argument("quadrature: levels and orders must be >= 1");
}

QuadratureConfig QuadratureConfig::coarse() const {
  QuadratureConfig c = *this;
  c.near_levels = std::max(1, near_levels / 2);
  c.sphere_order = std::max(1, sphere_order / 2);
  c.radial_order = std::max(1, radial_order / 2);
  c.estimate_error = false;
  return c;
}

QuadratureConfig QuadratureConfig::refined() const {
  QuadratureConfig c = *this;
  c.near_levels = near_levels * 2;
  c.sphere_order = sphere_order * 2;
  c.radial_order = std::min(128, radial_order * 2);
  return c;
}

DirectionRule half_sphere_rule(int dim, int order, const std::optional<Vec>& axis) {
  DirectionRule r;
  order = std::max(order, 1);
  if (dim == 1) {
    double sign = axis && (*axis)[0] < 0.0 ? -1.0 : 1.0;
    r.q.push_back(Vec::Constant(1, sign));
    r.w.push_back(1.0);
    return r;
  }
  if (dim == 2) {
    if (!axis) {
      for (int k = 0; k < order; ++k) {
        double t = (k + 0.5) * kPi / order;
        Vec q(2);
        q << std::cos(t), std::sin(t);
        r.q.push_back(q);
        r.w.push_back(kPi / order);
      }
      return r;
    }
    double base = std::atan2((*axis)[1], (*axis)[0]) - 0.5 * kPi;
    for (auto [t, w] : quad::graded_nodes(0.0, kPi, std::max(2, order / 4), 4, true, true)) {
      Vec q(2);
      q << std::cos(base + t), std::sin(base + t);
      r.q.push_back(q);
      r.w.push_back(w);
    }
    return r;
  }
  if (dim == 3) {
    Eigen::Vector3d a = axis ? Eigen::Vector3d((*axis)[0], (*axis)[1], (*axis)[2]).normalized() : Eigen::Vector3d::UnitZ();
    Eigen::Vector3d e1 = std::abs(a.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    e1 = (e1 - e1.dot(a) * a).normalized();
    Eigen::Vector3d e2 = a.cross(e1);
    std::vector<std::pair<double, double>> zs;
    if (axis) {
      zs = quad::graded_nodes(0.0, 1.0, std::max(2, order / 8), 4, true, false);
    } else {
      const quad::GaussRule& g = quad::gauss_legendre(std::max(2, order / 4));
      for (std::size_t i = 0; i < g.nodes.size(); ++i) zs.emplace_back(0.5 * (g.nodes[i] + 1.0), 0.5 * g.weights[i]);
    }
    int nphi = std::max(4, order / 2);
    for (auto [z, wz] : zs) {
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int m = 0; m < nphi; ++m) {
        double phi = 2.0 * kPi * (m + 0.5) / nphi;
        Eigen::Vector3d q = z * a + rho * (std::cos(phi) * e1 + std::sin(phi) * e2);
        r.q.push_back(Vec(q));
        r.w.push_back(wz * 2.0 * kPi / nphi);
      }
    }
    return r;
  }
  throw std::invalid_argument("only dimensions 1, 2, 3 are supported");
}

DirectionalSamples sample_directions(const ScalarField& u, const Vec& x, double s, const QuadratureConfig& cfg,
                                     const DirectionRule* rule) {
  cfg.validate();
  check_point(u, x, s);
  DirectionRule own;
  if (!rule) {
    own = half_sphere_rule(u.dim(), cfg.sphere_order, u.critical_axis(x));
    rule = &own;
  }
  return sample_rays(linear_problem(u, x), x, s, cfg, *rule);
}

SamplePair sample_pair(const ScalarField& u, const Vec& x, double s, const QuadratureConfig& cfg) {
  SamplePair out;
  out.fine = sample_directions(u, x, s, cfg);
  if (cfg.estimate_error) out.coarse = sample_directions(u, x, s, cfg.coarse());
  return out;
}

DirectionalSamples combine(double a, const DirectionalSamples& A, double b, const DirectionalSamples& B) {
  if (A.psi.size() != B.psi.size()) throw std::invalid_argument("combine: samples use different rules");
  DirectionalSamples out = A;
  for (std::size_t k = 0; k < out.psi.size(); ++k) out.psi[k] = a * A.psi[k] + b * B.psi[k];
  out.tail_bound = std::abs(a) * A.tail_bound + std::abs(b) * B.tail_bound;
  return out;
}

SamplePair combine(double a, const SamplePair& A, double b, const SamplePair& B) {
  SamplePair out;
  out.fine = combine(a, A.fine, b, B.fine);
  if (A.coarse && B.coarse) out.coarse = combine(a, *A.coarse, b, *B.coarse);
  return out;
}

EvalResult reduce(const SamplePair& samples, const Reduction& red, double angular_bound) {
  EvalResult r;
  r.value = red(samples.fine);
  if (samples.coarse) r.error_estimate = std::abs(r.value - red(*samples.coarse));
  if (samples.fine.tail_bound > 0.0) {
    double total_w = 0.0;
    for (double w : samples.fine.rule.w) total_w += w;
    r.error_estimate += angular_bound * total_w * samples.fine.tail_bound;
  }
  return r;
}

double reduce_linear(const Kernel& k, const DirectionalSamples& d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.psi.size(); ++i) acc += d.rule.w[i] * k.angular(d.rule.q[i]) * d.psi[i];
  return acc;
}

double reduce_pucci(const EllipticityBounds& b, const DirectionalSamples& d, bool plus) {
  double up = plus ? b.Gamma : b.gamma, down = plus ? b.gamma : b.Gamma;
  double acc = 0.0;
  for (std::size_t i = 0; i < d.psi.size(); ++i) {
    double v = d.psi[i];
    acc += d.rule.w[i] * (v > 0.0 ? up * v : down * v);
  }
  return acc;
}

double reduce_isaacs(const KernelFamily& fam, const DirectionalSamples& d) {
  double best = kInf;
  for (std::size_t i = 0; i < fam.rows(); ++i) {
    double worst = -kInf;
    for (std::size_t j = 0; j < fam.cols(); ++j) worst = std::max(worst, reduce_linear(fam.at(i, j), d));
    best = std::min(best, worst);
  }
  return best;
}

namespace {

double max_angular(const Kernel& k, const DirectionRule& rule) {
  double m = 0.0;
  for (const Vec& q : rule.q) m = std::max(m, k.angular(q));
  return m;
}

}  // namespace

EvalResult linear_op(const Kernel& k, const ScalarField& u, const Vec& x, const QuadratureConfig& cfg) {
  if (k.dim() != u.dim()) throw std::invalid_argument("kernel and field dimensions differ");
  SamplePair sp = sample_pair(u, x, k.s(), cfg);
  return reduce(sp, [&](const DirectionalSamples& d) { return reduce_linear(k, d); }, max_angular(k, sp.fine.rule));
}

EvalResult frac_laplacian(const ScalarField& u, const Vec& x, double s, const QuadratureConfig& cfg) {
  return linear_op(Kernel::isotropic(u.dim(), s, true), u, x, cfg);
}

EvalResult pucci_plus(const ScalarField& u, const Vec& x, const EllipticityBounds& b, double s,
                      const QuadratureConfig& cfg) {
  SamplePair sp = sample_pair(u, x, s, cfg);
  return reduce(sp, [&](const DirectionalSamples& d) { return reduce_pucci(b, d, true); }, b.Gamma);
}

EvalResult pucci_minus(const ScalarField& u, const Vec& x, const EllipticityBounds& b, double s,
                       const QuadratureConfig& cfg) {
  SamplePair sp = sample_pair(u, x, s, cfg);
  return reduce(sp, [&](const DirectionalSamples& d) { return reduce_pucci(b, d, false); }, b.Gamma);
}

EvalResult isaacs_op(const KernelFamily& fam, const ScalarField& u, const Vec& x, const QuadratureConfig& cfg) {
  if (fam.rows() == 0 || fam.cols() == 0) throw std::invalid_argument("isaacs_op: empty index set");
  if (fam.dim() != u.dim()) throw std::invalid_argument("family and field dimensions differ");
  SamplePair sp = sample_pair(u, x, fam.s(), cfg);
  double bound = 0.0;
  for (std::size_t i = 0; i < fam.rows(); ++i)
    for (std::size_t j = 0; j < fam.cols(); ++j) bound = std::max(bound, max_angular(fam.at(i, j), sp.fine.rule));
  return reduce(sp, [&](const DirectionalSamples& d) { return reduce_isaacs(fam, d); }, bound);
}

EvalResult bilinear_form(const Kernel& k, const ScalarField& f, const ScalarField& g, const Vec& x,
                         const QuadratureConfig& cfg) {
  cfg.validate();
  check_point(f, x, k.s());
  const double fx = f(x), gx = g(x);
  RayProblem pb;
  pb.dim = f.dim();
  // One Lipschitz factor makes the product integrable at x; the radius of
  // the near field only needs the smoother of the two.
  pb.smooth_radius = std::max(f.smooth_radius(x), g.smooth_radius(x));
  double sr = std::min(f.smooth_radius(x), g.smooth_radius(x));
  if (sr > 0.0) pb.smooth_radius = sr;
  pb.breakpoints = [&](const Vec& q) {
    std::vector<double> a = both_ways(f, x, q), b = both_ways(g, x, q);
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
  };
  auto P = [&](const Vec& y) { return (f(y) - fx) * (g(y) - gx); };
  pb.full = [&](const Vec& q, double r) { return 0.5 * (P(x + r * q) + P(x - r * q)); };
  pb.var = [&](const Vec& q, double r) {
    auto part = [&](const Vec& y) { return f(y) * g(y) - fx * g(y) - gx * f(y); };
    return 0.5 * (part(x + r * q) + part(x - r * q));
  };
  pb.c_const = fx * gx;
  const Integrability &a = f.integrability(), &b = g.integrability();
  if (a.compact && b.compact) {
    pb.integrability = a;
    pb.integrability.radius = std::max(a.radius, (b.center - a.center).norm() + b.radius);
  } else {
    pb.integrability.compact = false;
    pb.integrability.M = kInf;
  }
  QuadratureConfig fine_cfg = cfg;
  if (fine_cfg.tail_mode == TailMode::kGrowthBound && !pb.integrability.compact) fine_cfg.tail_mode = TailMode::kMapped;
  auto axis = f.critical_axis(x);
  if (!axis) axis = g.critical_axis(x);
  SamplePair sp;
  DirectionRule rule = half_sphere_rule(pb.dim, cfg.sphere_order, axis);
  sp.fine = sample_rays(pb, x, k.s(), fine_cfg, rule);
  if (cfg.estimate_error) {
    QuadratureConfig c = fine_cfg.coarse();
    sp.coarse = sample_rays(pb, x, k.s(), c, half_sphere_rule(pb.dim, c.sphere_order, axis));
  }
  EvalResult r = reduce(sp, [&](const DirectionalSamples& d) { return reduce_linear(k, d); });
  if (!std::isfinite(r.value) || !std::isfinite(r.error_estimate) || r.error_estimate > 1e6 * (1.0 + std::abs(r.value)))
    throw NumericalFailure("bilinear_form: refinement diverges; the product is not integrable near x");
  return r;
}

namespace {

// PV int_0^inf [(1 + u)^tau + (1 - u)_+^tau - 2] u^{-1-2s} du, arranged so
// that every singular piece is either exact or a power with a smooth factor.
double half_line_constant(double tau, double s, int levels, int order) {
  auto near0 = [&](double u) {
    return (std::expm1(tau * std::log1p(u)) + std::expm1(tau * std::log1p(-u))) * std::pow(u, -1.0 - 2.0 * s);
  };
  double I1a = quad::integrate_toward_zero(near0, 0.5, levels, order);
  // u = 1 - w on [1/2, 1); w^tau (1-w)^{-1-2s} = w^tau + w^tau [(1-w)^{-1-2s} - 1].
  auto near1 = [&](double w) {
    double rest = (std::pow(2.0 - w, tau) - 2.0) * std::pow(1.0 - w, -1.0 - 2.0 * s);
    return rest + std::pow(w, tau) * std::expm1(-(1.0 + 2.0 * s) * std::log1p(-w));
  };
  double I1b = quad::integrate_toward_zero(near1, 0.5, levels, order) + std::pow(0.5, tau + 1.0) / (tau + 1.0);
  // u = 1/v on (1, inf): int_0^1 v^{2s-1-tau} (1+v)^tau dv - 1/s.
  auto far = [&](double v) { return std::pow(v, 2.0 * s - 1.0 - tau) * std::expm1(tau * std::log1p(v)); };
  double J = quad::integrate_graded(far, 0.0, 1.0, levels, order) + 1.0 / (2.0 * s - tau);
  return I1a + I1b + J - 1.0 / s;
}

}  // namespace

EvalResult half_space_moment(const Kernel& k, const QuadratureConfig& cfg) {
  const int N = k.dim();
  const double s = k.s();
  EvalResult r;
  if (k.anisotropy().is_constant()) {
    double base = N == 1 ? 1.0
                 : N == 2 ? std::sqrt(kPi) * std::tgamma(s + 0.5) / std::tgamma(s + 1.0)
                          : 2.0 * kPi / (2.0 * s + 1.0);
    r.value = base * k.scale() * k.anisotropy().constant_value();
    return r;
  }
  Vec axis = unit_vec(N, N - 1);
  auto moment = [&](int order) {
    DirectionRule rule = half_sphere_rule(N, order, axis);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.q.size(); ++i)
      acc += rule.w[i] * k.angular(rule.q[i]) * std::pow(std::max(0.0, rule.q[i][N - 1]), 2.0 * s);
    return acc;
  };
  r.value = moment(cfg.sphere_order);
  r.error_estimate = std::abs(r.value - moment(std::max(1, cfg.sphere_order / 2)));
  return r;
}

EvalResult c_constant(const Kernel& k, double tau, const QuadratureConfig& cfg) {
  const double s = k.s();
  if (!(tau > -1.0 && tau < 2.0 * s)) throw std::domain_error("c_constant: tau must lie in (-1, 2s)");
  cfg.validate();
  EvalResult A = half_space_moment(k, cfg);
  double c1 = half_line_constant(tau, s, cfg.near_levels, cfg.radial_order);
  double c1c = half_line_constant(tau, s, std::max(1, cfg.near_levels / 2), std::max(1, cfg.radial_order / 2));
  EvalResult r;
  r.value = A.value * c1;
  r.error_estimate = std::abs(A.value * (c1 - c1c)) + A.error_estimate * std::abs(c1);
  return r;
}

}  // namespace fracblow
