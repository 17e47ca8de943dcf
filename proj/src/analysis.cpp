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


#include "fracblow/analysis.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fracblow/parallel.hpp"
#include "fracblow/quadrature.hpp"

namespace fracblow {

namespace {

void check_on_boundary(const Domain& dom, const Vec& p, const char* what) {
  if (p.size() != dom.dim() || dom.boundary_gap(p) > 1e-8)
    throw std::domain_error(std::string(what) + " is not a boundary point");
}

}  // namespace

// ---------------------------------------------------------------- profile

ProfileReport boundary_profile(const PointFunction& u, const Domain& dom, double s, const PointFunction& h,
                               const std::vector<Vec>& anchors, std::vector<double> distances,
                               double min_distance) {
  std::sort(distances.begin(), distances.end(), std::greater<>());
  distances.erase(std::unique(distances.begin(), distances.end()), distances.end());
  ProfileReport rep;
  std::vector<double> kept;
  for (double d : distances) {
    if (!(d > 0.0)) throw std::invalid_argument("boundary_profile: distances must be positive");
    if (d < min_distance) {
      std::ostringstream os;
      os << "distance " << d << " lies in the prescribed layer and was skipped";
      rep.warnings.push_back(os.str());
    } else {
      kept.push_back(d);
    }
  }
  if (kept.empty()) throw std::invalid_argument("boundary_profile: no distance outside the layer");
  for (const Vec& x0 : anchors) check_on_boundary(dom, x0, "profile anchor");
  rep.rays.resize(anchors.size());
  parallel_for(anchors.size(), [&](std::size_t i) {
    ProfileRay& ray = rep.rays[i];
    ray.x0 = anchors[i];
    ray.h0 = h(ray.x0);
    Vec n = dom.inward_normal(ray.x0);
    for (double d : kept) {
      double r = std::pow(d, 1.0 - s) * u(ray.x0 + d * n);
      ray.distances.push_back(d);
      ray.renormalized.push_back(r);
      ray.errors.push_back(std::abs(r - ray.h0));
    }
  });
  rep.smallest_distance = kept.back();
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    double e = 0.0;
    for (const ProfileRay& ray : rep.rays) e = std::max(e, ray.errors[k]);
    if (e > 0.0) {
      lx.push_back(std::log(kept[k]));
      ly.push_back(std::log(e));
    }
  }
  for (const ProfileRay& ray : rep.rays) {
    rep.max_error_at_smallest = std::max(rep.max_error_at_smallest, ray.errors.back());
    if (ray.h0 != 0.0)
      rep.max_relative_error_at_smallest =
          std::max(rep.max_relative_error_at_smallest, ray.errors.back() / std::abs(ray.h0));
  }
  if (lx.size() >= 2) rep.fitted_exponent = quad::fit_line(lx, ly).slope;
  return rep;
}

// ---------------------------------------------------------------- rates

Vec centered_gradient(const PointFunction& u, const Vec& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("centered_gradient: step must be positive");
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec e = Vec::Zero(x.size());
    e[i] = step;
    g[i] = (u(x + e) - u(x - e)) / (2.0 * step);
  }
  return g;
}

RateReport gradient_rate(const PointFunction& u, const Domain& dom, double d_min, double d_max,
                         const std::vector<Vec>& anchors, int samples_per_ray,
                         const std::function<double(const Vec&)>& step_fn) {
  if (!(d_min > 0.0 && d_max > d_min)) throw std::invalid_argument("gradient_rate: bad distance band");
  if (samples_per_ray < 2) throw std::invalid_argument("gradient_rate: need two samples per ray");
  for (const Vec& x0 : anchors) check_on_boundary(dom, x0, "rate anchor");
  std::vector<double> ds;
  for (int k = 0; k < samples_per_ray; ++k)
    ds.push_back(d_min * std::pow(d_max / d_min, static_cast<double>(k) / (samples_per_ray - 1)));
  const std::size_t n = anchors.size() * ds.size();
  std::vector<double> grad(n, 0.0), dist(n, 0.0);
  parallel_for(n, [&](std::size_t idx) {
    const Vec& x0 = anchors[idx / ds.size()];
    double d = ds[idx % ds.size()];
    Vec x = x0 + d * dom.inward_normal(x0);
    double h = step_fn ? step_fn(x) : d / 100.0;
    dist[idx] = d;
    grad[idx] = centered_gradient(u, x, h).norm();
  });
  RateReport rep;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::isfinite(grad[i]) && grad[i] > 0.0)) continue;
    rep.d.push_back(dist[i]);
    rep.grad.push_back(grad[i]);
    lx.push_back(std::log(dist[i]));
    ly.push_back(std::log(grad[i]));
  }
  if (lx.size() < 10) throw NumericalFailure("gradient_rate: fewer than 10 valid samples");
  quad::LineFit fit = quad::fit_line(lx, ly);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.slope_stderr = fit.slope_stderr;
  rep.band_lo = fit.slope - 2.0 * fit.slope_stderr;
  rep.band_hi = fit.slope + 2.0 * fit.slope_stderr;
  auto [lo, hi] = std::minmax_element(rep.d.begin(), rep.d.end());
  rep.decades = std::log10(*hi / *lo);
  rep.spans_required_decades = rep.decades >= 1.5;
  return rep;
}

// ---------------------------------------------------------------- rescaling

std::vector<RescaledMember> rescaled_family(const PointFunction& u, const Domain& dom, double s,
                                            const std::vector<Vec>& base_points, const std::vector<double>& d) {
  if (base_points.size() != d.size()) throw std::invalid_argument("rescaled_family: size mismatch");
  std::vector<RescaledMember> out;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!(d[j] > 0.0 && d[j] < dom.inradius() / 4.0))
      throw std::invalid_argument("rescaled_family: d_j must lie in (0, inradius/4)");
    BoundaryFrame frame = dom.boundary_frame(base_points[j]);
    RescaledMember m;
    m.z = base_points[j];
    m.d = d[j];
    const double scale = std::pow(d[j], 1.0 - s), dj = d[j];
    m.v = [u, frame, scale, dj](const Vec& y) {
      return scale * u(frame.to_global(dj * y));
    };
    Vec eN = unit_vec(dom.dim(), dom.dim() - 1);
    m.v_at_eN = m.v(eN);
    m.grad_at_eN = centered_gradient(m.v, eN, 1e-3);
    out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------- product formula

ProductFormulaReport product_formula_check(const Kernel& k, DomainPtr dom, double tau, double alpha,
                                           const Vec& x0, const Vec& z, std::vector<double> rho,
                                           const QuadratureConfig& cfg, std::vector<double> exponents) {
  const double s = k.s();
  if (!(alpha > 0.0 && alpha < 2.0 * s)) throw std::domain_error("product_formula_check: alpha outside (0, 2s)");
  if (!(tau > -1.0 && tau < 2.0 * s)) throw std::domain_error("product_formula_check: tau outside (-1, 2s)");
  check_on_boundary(*dom, x0, "x0");
  check_on_boundary(*dom, z, "approach point");
  if ((z - x0).norm() < 1e-6) throw std::domain_error("product_formula_check: approach point must differ from x0");
  if (exponents.empty()) {
    double p = 2.0 * s - tau;
    exponents = std::abs(p - 1.0) < 0.05 ? std::vector<double>{1.0, 2.0} : std::vector<double>{p, 1.0};
  }
  std::sort(rho.begin(), rho.end(), std::greater<>());
  for (double r : rho)
    if (!(r > 0.0 && r <= dom->inradius() / 10.0))
      throw std::domain_error("product_formula_check: rho outside (0, inradius/10]");
  if (rho.size() < exponents.size() + 1) throw std::invalid_argument("product_formula_check: too few distances");

  FieldPtr f = product_field(dist_pow_field(dom, tau), radial_power_field(x0, alpha));
  Vec n = dom->inward_normal(z);
  ProductFormulaReport rep;
  rep.x0 = x0;
  rep.z = z;
  rep.rho = rho;
  rep.exponents = exponents;
  rep.values.resize(rho.size());
  rep.errors.resize(rho.size());
  rep.ratios.resize(rho.size());
  parallel_for(rho.size(), [&](std::size_t i) {
    Vec x = z + rho[i] * n;
    EvalResult r = linear_op(k, *f, x, cfg);
    double scale = std::pow((x - x0).norm(), alpha) * std::pow(rho[i], tau - 2.0 * s);
    rep.values[i] = r.value;
    rep.errors[i] = r.error_estimate / scale;
    rep.ratios[i] = r.value / scale;
  });
  rep.c_expected = c_constant(k, tau, cfg).value;

  Eigen::MatrixXd M(rho.size(), exponents.size() + 1);
  Eigen::VectorXd b(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    M(i, 0) = 1.0;
    for (std::size_t j = 0; j < exponents.size(); ++j) M(i, j + 1) = std::pow(rho[i], exponents[j]);
    b[i] = rep.ratios[i];
  }
  rep.limit = M.colPivHouseholderQr().solve(b)[0];
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double res = std::abs(rep.ratios[i] - rep.limit);
    if (res > 0.0) {
      lx.push_back(std::log(rho[i]));
      ly.push_back(std::log(res));
    }
  }
  if (lx.size() >= 2) rep.residual_slope = quad::fit_line(lx, ly).slope;
  return rep;
}

// ---------------------------------------------------------------- indicator

double exterior_kernel_mass(const Domain& dom, const Vec& x, double s, int directions) {
  if (dom.distance(x) <= 0.0) throw std::domain_error("exterior_kernel_mass: point must be interior");
  DirectionRule rule = half_sphere_rule(dom.dim(), directions, std::nullopt);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.q.size(); ++k)
    for (double sg : {1.0, -1.0}) {
      std::vector<double> cross = dom.ray_boundary_crossings(x, sg * rule.q[k]);
      if (cross.empty()) continue;
      acc += rule.w[k] * std::pow(cross.front(), -2.0 * s) / (2.0 * s);
    }
  return acc;
}

IndicatorReport indicator_check(DomainPtr dom, const EllipticityBounds& b, double s, const std::vector<Vec>& points,
                                const QuadratureConfig& cfg) {
  FieldPtr chi = indicator_field(dom);
  IndicatorReport rep;
  rep.points = points;
  rep.values.resize(points.size());
  rep.errors.resize(points.size());
  rep.oracle.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    EvalResult r = pucci_minus(*chi, points[i], b, s, cfg);
    rep.values[i] = r.value;
    rep.errors[i] = r.error_estimate;
    rep.oracle[i] = -b.Gamma * exterior_kernel_mass(*dom, points[i], s);
  });
  rep.all_negative = !points.empty();
  rep.fitted_c = points.empty() ? 0.0 : kInfinity;
  const double diam2s = std::pow(dom->diameter(), 2.0 * s);
  for (std::size_t i = 0; i < points.size(); ++i) {
    rep.all_negative = rep.all_negative && rep.values[i] < 0.0;
    rep.fitted_c = std::min(rep.fitted_c, -rep.values[i] * diam2s);
    rep.max_oracle_rel_error =
        std::max(rep.max_oracle_rel_error, std::abs(rep.values[i] - rep.oracle[i]) / std::abs(rep.oracle[i]));
  }
  return rep;
}

// ---------------------------------------------------------------- s -> 1

LimitCoefficients limit_coefficients(const Anisotropy& a, int dim, const std::vector<double>& s_values,
                                     int sphere_order) {
  if (s_values.size() < 2) throw std::invalid_argument("limit_coefficients: need at least two values of s");
  for (std::size_t m = 0; m < s_values.size(); ++m) {
    if (!(s_values[m] > 0.0 && s_values[m] < 1.0))
      throw std::invalid_argument("limit_coefficients: s must lie in (0, 1)");
    if (m > 0 && !(s_values[m] > s_values[m - 1]))
      throw std::invalid_argument("limit_coefficients: s sequence must increase");
  }
  DirectionRule rule = half_sphere_rule(dim, sphere_order, std::nullopt);
  std::vector<double> moment(dim, 0.0);
  for (std::size_t j = 0; j < rule.q.size(); ++j) {
    double av = a(rule.q[j]);
    for (int k = 0; k < dim; ++k) moment[k] += 2.0 * rule.w[j] * rule.q[j][k] * rule.q[j][k] * av;
  }
  LimitCoefficients out;
  out.s_values = s_values;
  for (double s : s_values) {
    std::vector<double> row;
    for (int k = 0; k < dim; ++k) row.push_back(normalizing_constant(dim, s) / (2.0 - 2.0 * s) * moment[k]);
    out.A.push_back(row);
  }
  double scale = 0.0;
  for (const auto& row : out.A)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int k = 0; k < dim; ++k) {
    // Lagrange interpolation in t = 1 - s evaluated at t = 0.
    double lim = 0.0;
    for (std::size_t m = 0; m < s_values.size(); ++m) {
      double w = 1.0;
      for (std::size_t l = 0; l < s_values.size(); ++l)
        if (l != m) w *= (1.0 - s_values[l]) / ((1.0 - s_values[l]) - (1.0 - s_values[m]));
      lim += w * out.A[m][k];
    }
    if (!std::isfinite(lim) || std::abs(lim) > 10.0 * scale)
      throw NumericalFailure("limit_coefficients: extrapolation diverges");
    out.limit.push_back(lim);
    out.operator_coefficient.push_back(0.5 * lim);
  }
  return out;
}

double fd_laplacian(const PointFunction& u, const Vec& x, double h) {
  double u0 = u(x), acc = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    Vec e = Vec::Zero(x.size());
    e[i] = h;
    acc += (u(x + e) + u(x - e) - 2.0 * u0) / (h * h);
  }
  return acc;
}

// ---------------------------------------------------------------- half-space

HalfspaceReport halfspace_checks(const Vec& p_tangential, double s, const QuadratureConfig& cfg,
                                 std::vector<Vec> points) {
  if (p_tangential.size() < 1 || p_tangential.norm() == 0.0)
    throw std::invalid_argument("halfspace_checks: p' must be nonzero");
  const int N = static_cast<int>(p_tangential.size()) + 1;
  Vec pfull = Vec::Zero(N);
  pfull.head(N - 1) = p_tangential;
  if (points.empty()) {
    Vec dir = pfull / pfull.norm();
    for (int j = 0; j < 10; ++j) {
      Vec x = (0.2 + 0.08 * j) * (j % 2 ? -1.0 : 1.0) * dir;
      x[N - 1] = 0.1 + 0.1 * j;
      points.push_back(x);
    }
  }
  FieldPtr u = halfspace_mode_field(p_tangential, s);
  FieldPtr phi1 = affine_field(pfull);
  FieldPtr phi2 = halfspace_power_field(N, s - 1.0);
  Kernel K = Kernel::isotropic(N, s, true);
  HalfspaceReport rep;
  rep.rows.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    HalfspaceRow& row = rep.rows[i];
    row.x = points[i];
    row.direct = frac_laplacian(*u, row.x, s, cfg);
    row.refined = frac_laplacian(*u, row.x, s, cfg.refined());
    row.decay = row.refined.error_estimate > 0.0 ? row.direct.error_estimate / row.refined.error_estimate
                                                  : kInfinity;
    EvalResult l2 = frac_laplacian(*phi2, row.x, s, cfg);
    EvalResult B = bilinear_form(K, *phi1, *phi2, row.x, cfg);
    double a = phi1->value(row.x);
    row.decomposition.value = a * l2.value + 2.0 * B.value;
    row.decomposition.error_estimate = std::abs(a) * l2.error_estimate + 2.0 * B.error_estimate;
    row.within_estimate = std::abs(row.direct.value) <= row.direct.error_estimate;
    row.decomposition_agrees = std::abs(row.decomposition.value - row.direct.value) <=
                               row.decomposition.error_estimate + row.direct.error_estimate;
  });
  rep.all_within = rep.all_decay = rep.all_agree = !rep.rows.empty();
  for (const HalfspaceRow& r : rep.rows) {
    rep.all_within = rep.all_within && r.within_estimate;
    rep.all_decay = rep.all_decay && r.decay >= 2.0;
    rep.all_agree = rep.all_agree && r.decomposition_agrees;
  }
  rep.gradient_point = Vec::Zero(N);
  rep.gradient_point[N - 1] = 0.5;
  rep.gradient_fd = centered_gradient([u](const Vec& y) { return u->value(y); }, rep.gradient_point, 1e-5);
  rep.gradient_exact = std::pow(0.5, s - 1.0) * pfull;
  return rep;
}

}  // namespace fracblow
