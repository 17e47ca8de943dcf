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

#include "fracblow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracblow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Integrability growth(double M, double p) {
  Integrability g;
  g.compact = false;
  g.M = M;
  g.p = p;
  return g;
}

Integrability compact_in(const Vec& center, double radius) {
  Integrability g;
  g.compact = true;
  g.center = center;
  g.radius = radius;
  return g;
}

Integrability domain_support(const Domain& dom) {
  if (dom.name() == "halfspace") return growth(kInf, 0.0);
  Vec lo = dom.bbox_lo(), hi = dom.bbox_hi();
  return compact_in(0.5 * (lo + hi), 0.5 * (hi - lo).norm());
}

double smooth_cutoff(double t) {
  auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  double a = f(2.0 - t), b = f(t - 1.0);
  return a / (a + b);
}

std::vector<double> merge(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

ScalarField::ScalarField(Parts parts) : parts_(std::move(parts)) {
  if (!parts_.value) throw std::invalid_argument("ScalarField needs an evaluator");
  if (!parts_.smooth_radius) parts_.smooth_radius = [](const Vec&) { return kInf; };
  if (!parts_.breakpoints) parts_.breakpoints = [](const Vec&, const Vec&) { return std::vector<double>{}; };
  if (!parts_.critical_axis) parts_.critical_axis = [](const Vec&) { return std::optional<Vec>{}; };
}

std::vector<double> ScalarField::breakpoints(const Vec& x, const Vec& q) const {
  std::vector<double> r = parts_.breakpoints(x, q);
  r.erase(std::remove_if(r.begin(), r.end(), [](double t) { return !(t > 0.0) || !std::isfinite(t); }), r.end());
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end(), [](double a, double b) { return std::abs(a - b) <= 1e-14 * std::max(1.0, b); }),
          r.end());
  return r;
}

std::optional<Vec> ScalarField::critical_axis(const Vec& x) const { return parts_.critical_axis(x); }

std::optional<Vec> boundary_axis_near(const Domain& dom, const Vec& x) {
  if (dom.name() == "halfspace") return dom.inward_normal(x);
  double d = dom.distance(x);
  if (!(d > 0.0) || d > 0.3 * dom.reach()) return std::nullopt;
  try {
    return dom.inward_normal(dom.project(x));
  } catch (const NonUniqueProjection&) {
    return std::nullopt;
  }
}

FieldPtr constant_field(int dim, double c) {
  ScalarField::Parts p;
  p.dim = dim;
  p.name = "constant";
  p.value = [c](const Vec&) { return c; };
  p.integrability = growth(std::abs(c), 0.0);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr affine_field(const Vec& slope, double c) {
  ScalarField::Parts p;
  p.dim = static_cast<int>(slope.size());
  p.name = "affine";
  p.value = [slope, c](const Vec& x) { return slope.dot(x) + c; };
  p.integrability = growth(slope.norm() + std::abs(c), 1.0);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr dist_pow_field(DomainPtr dom, double tau) {
  ScalarField::Parts p;
  p.dim = dom->dim();
  p.name = "dist-pow";
  p.value = [dom, tau](const Vec& x) { return dom->d_tau(tau, x); };
  p.smooth_radius = [dom](const Vec& x) { return dom->smooth_radius(x); };
  p.breakpoints = [dom](const Vec& x, const Vec& q) { return dom->ray_boundary_crossings(x, q); };
  p.critical_axis = [dom](const Vec& x) { return boundary_axis_near(*dom, x); };
  p.integrability = domain_support(*dom);
  if (!p.integrability.compact) {
    // d(y) <= d(0) + |y| for the half-space.
    double off = dom->distance(Vec::Zero(dom->dim()));
    p.integrability = tau >= 0.0 ? growth(std::pow(1.0 + off, tau), tau) : growth(kInf, 0.0);
  }
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr dist_function_field(DomainPtr dom, std::function<double(double)> phi, std::string name) {
  ScalarField::Parts p;
  p.dim = dom->dim();
  p.name = std::move(name);
  p.value = [dom, phi = std::move(phi)](const Vec& x) {
    double d = dom->distance(x);
    return d > 0.0 ? phi(d) : 0.0;
  };
  p.smooth_radius = [dom](const Vec& x) { return dom->smooth_radius(x); };
  p.breakpoints = [dom](const Vec& x, const Vec& q) { return dom->ray_boundary_crossings(x, q); };
  p.critical_axis = [dom](const Vec& x) { return boundary_axis_near(*dom, x); };
  p.integrability = domain_support(*dom);
  if (!p.integrability.compact) throw std::invalid_argument("dist_function_field: bounded domains only");
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr indicator_field(DomainPtr dom) {
  ScalarField::Parts p;
  p.dim = dom->dim();
  p.name = "indicator";
  p.value = [dom](const Vec& x) { return dom->inside(x) ? 1.0 : 0.0; };
  p.smooth_radius = [dom](const Vec& x) { return dom->distance(x); };
  p.breakpoints = [dom](const Vec& x, const Vec& q) { return dom->ray_boundary_crossings(x, q); };
  p.critical_axis = [dom](const Vec& x) { return boundary_axis_near(*dom, x); };
  p.integrability = domain_support(*dom);
  if (!p.integrability.compact) p.integrability = growth(1.0, 0.0);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr ball_profile_field(std::shared_ptr<const Ball> ball, double s) {
  ScalarField::Parts p;
  p.dim = ball->dim();
  p.name = "ball-profile";
  Vec c = ball->center();
  double R = ball->radius();
  p.value = [c, R, s](const Vec& x) {
    double t = R * R - (x - c).squaredNorm();
    return t > 0.0 ? std::pow(t, s - 1.0) : 0.0;
  };
  p.smooth_radius = [c, R](const Vec& x) { return std::max(0.0, R - (x - c).norm()); };
  p.breakpoints = [ball](const Vec& x, const Vec& q) { return ball->ray_boundary_crossings(x, q); };
  p.critical_axis = [ball](const Vec& x) { return boundary_axis_near(*ball, x); };
  p.integrability = compact_in(c, R);
  return std::make_shared<ScalarField>(std::move(p));
}

namespace {

std::vector<double> plane_crossing(const Vec& x, const Vec& q) {
  int n = static_cast<int>(x.size()) - 1;
  if (q[n] == 0.0) return {};
  double r = -x[n] / q[n];
  return r > 0.0 ? std::vector<double>{r} : std::vector<double>{};
}

}  // namespace

FieldPtr halfspace_power_field(int dim, double tau) {
  ScalarField::Parts p;
  p.dim = dim;
  p.name = "halfspace-profile";
  p.value = [tau](const Vec& x) {
    double t = x[x.size() - 1];
    return t > 0.0 ? std::pow(t, tau) : 0.0;
  };
  p.smooth_radius = [](const Vec& x) { return std::abs(x[x.size() - 1]); };
  p.breakpoints = plane_crossing;
  p.critical_axis = [dim](const Vec&) { return std::optional<Vec>(unit_vec(dim, dim - 1)); };
  p.integrability = tau >= 0.0 ? growth(1.0, tau) : growth(kInf, 0.0);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr halfspace_mode_field(const Vec& pt, double s) {
  int dim = static_cast<int>(pt.size()) + 1;
  ScalarField::Parts p;
  p.dim = dim;
  p.name = "halfspace-mode";
  p.value = [pt, s](const Vec& x) {
    int n = static_cast<int>(x.size()) - 1;
    double t = x[n];
    return t > 0.0 ? pt.dot(x.head(n)) * std::pow(t, s - 1.0) : 0.0;
  };
  p.smooth_radius = [](const Vec& x) { return std::abs(x[x.size() - 1]); };
  p.breakpoints = plane_crossing;
  p.critical_axis = [dim](const Vec&) { return std::optional<Vec>(unit_vec(dim, dim - 1)); };
  p.integrability = growth(kInf, s);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr gaussian_field(const Vec& center, double sigma) {
  ScalarField::Parts p;
  p.dim = static_cast<int>(center.size());
  p.name = "gaussian";
  p.value = [center, sigma](const Vec& x) { return std::exp(-(x - center).squaredNorm() / (2.0 * sigma * sigma)); };
  p.integrability = growth(1.0, 0.0);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr windowed_quadratic_field(const Vec& center, const Eigen::MatrixXd& Q, double R) {
  ScalarField::Parts p;
  p.dim = static_cast<int>(center.size());
  p.name = "windowed-quadratic";
  p.value = [center, Q, R](const Vec& x) {
    Eigen::VectorXd y = x - center;
    return y.dot(Q * y) * smooth_cutoff(y.norm() / R);
  };
  p.integrability = compact_in(center, 2.0 * R);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr radial_power_field(const Vec& x0, double alpha) {
  ScalarField::Parts p;
  p.dim = static_cast<int>(x0.size());
  p.name = "radial-power";
  p.value = [x0, alpha](const Vec& x) { return std::pow((x - x0).norm(), alpha); };
  p.smooth_radius = [x0](const Vec& x) { return (x - x0).norm(); };
  p.breakpoints = [x0](const Vec& x, const Vec& q) {
    double t = (x0 - x).dot(q);
    if (t > 0.0 && (x + t * q - x0).norm() <= 1e-12 * std::max(1.0, t)) return std::vector<double>{t};
    return std::vector<double>{};
  };
  p.integrability = growth(std::pow(1.0 + x0.norm(), alpha), alpha);
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr translated_field(FieldPtr u, const Vec& v) {
  ScalarField::Parts p;
  p.dim = u->dim();
  p.name = u->name() + "-shifted";
  p.value = [u, v](const Vec& x) { return u->value(x - v); };
  p.smooth_radius = [u, v](const Vec& x) { return u->smooth_radius(x - v); };
  p.breakpoints = [u, v](const Vec& x, const Vec& q) { return u->breakpoints(x - v, q); };
  p.critical_axis = [u, v](const Vec& x) { return u->critical_axis(x - v); };
  p.integrability = u->integrability();
  if (p.integrability.compact) {
    p.integrability.center = p.integrability.center + v;
  } else {
    p.integrability.M *= std::pow(1.0 + v.norm(), p.integrability.p);
  }
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr scaled_field(FieldPtr u, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaled_field: lambda must be positive");
  ScalarField::Parts p;
  p.dim = u->dim();
  p.name = u->name() + "-scaled";
  p.value = [u, lambda](const Vec& x) { return u->value(lambda * x); };
  p.smooth_radius = [u, lambda](const Vec& x) { return u->smooth_radius(lambda * x) / lambda; };
  p.breakpoints = [u, lambda](const Vec& x, const Vec& q) {
    std::vector<double> r = u->breakpoints(lambda * x, q);
    for (double& t : r) t /= lambda;
    return r;
  };
  p.critical_axis = [u, lambda](const Vec& x) { return u->critical_axis(lambda * x); };
  p.integrability = u->integrability();
  if (p.integrability.compact) {
    p.integrability.center /= lambda;
    p.integrability.radius /= lambda;
  } else {
    p.integrability.M *= std::pow(std::max(1.0, lambda), p.integrability.p);
  }
  return std::make_shared<ScalarField>(std::move(p));
}

namespace {

Integrability enclose(const Integrability& a, const Integrability& b) {
  double r = std::max(a.radius, (b.center - a.center).norm() + b.radius);
  return compact_in(a.center, r);
}

}  // namespace

FieldPtr product_field(FieldPtr f, FieldPtr g) {
  ScalarField::Parts p;
  p.dim = f->dim();
  p.name = f->name() + "*" + g->name();
  p.value = [f, g](const Vec& x) { return f->value(x) * g->value(x); };
  p.smooth_radius = [f, g](const Vec& x) { return std::min(f->smooth_radius(x), g->smooth_radius(x)); };
  p.breakpoints = [f, g](const Vec& x, const Vec& q) { return merge(f->breakpoints(x, q), g->breakpoints(x, q)); };
  p.critical_axis = [f, g](const Vec& x) {
    auto a = f->critical_axis(x);
    return a ? a : g->critical_axis(x);
  };
  const Integrability &a = f->integrability(), &b = g->integrability();
  if (a.compact && b.compact) {
    p.integrability = a.radius <= b.radius ? a : b;
  } else if (a.compact || b.compact) {
    p.integrability = a.compact ? a : b;
  } else {
    p.integrability = growth(a.M * b.M, a.p + b.p);
  }
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr linear_combination(double ca, FieldPtr f, double cb, FieldPtr g) {
  ScalarField::Parts p;
  p.dim = f->dim();
  p.name = "combination";
  p.value = [ca, f, cb, g](const Vec& x) { return ca * f->value(x) + cb * g->value(x); };
  p.smooth_radius = [f, g](const Vec& x) { return std::min(f->smooth_radius(x), g->smooth_radius(x)); };
  p.breakpoints = [f, g](const Vec& x, const Vec& q) { return merge(f->breakpoints(x, q), g->breakpoints(x, q)); };
  p.critical_axis = [f, g](const Vec& x) {
    auto a = f->critical_axis(x);
    return a ? a : g->critical_axis(x);
  };
  const Integrability &a = f->integrability(), &b = g->integrability();
  if (a.compact && b.compact) {
    p.integrability = enclose(a, b);
  } else {
    double Ma = a.compact ? 0.0 : a.M, Mb = b.compact ? 0.0 : b.M;
    // A compact part is bounded by its sup; the growth class absorbs it.
    p.integrability = growth(std::abs(ca) * Ma + std::abs(cb) * Mb + (a.compact || b.compact ? kInf : 0.0),
                             std::max(a.compact ? 0.0 : a.p, b.compact ? 0.0 : b.p));
  }
  return std::make_shared<ScalarField>(std::move(p));
}

FieldPtr field_from_spec(const std::string& spec, DomainPtr dom, double s) {
  std::string head = spec, args;
  if (auto pos = spec.find(':'); pos != std::string::npos) {
    head = spec.substr(0, pos);
    args = spec.substr(pos + 1);
  }
  auto number = [&](const std::string& text) {
    try {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("field '" + spec + "': bad number '" + text + "'");
    }
  };
  auto need_domain = [&]() {
    if (!dom) throw std::invalid_argument("field '" + spec + "' needs a domain");
  };
  if (head == "dist-pow") {
    need_domain();
    if (args.empty()) throw std::invalid_argument("dist-pow needs an exponent, e.g. dist-pow:-0.5");
    return dist_pow_field(dom, number(args));
  }
  if (head == "indicator") {
    need_domain();
    return indicator_field(dom);
  }
  if (head == "ball-profile") {
    auto ball = std::dynamic_pointer_cast<const Ball>(dom);
    if (!ball) throw std::invalid_argument("ball-profile needs a ball domain");
    return ball_profile_field(ball, s);
  }
  int dim = dom ? dom->dim() : 2;
  if (head == "halfspace-profile") return halfspace_power_field(dim, args.empty() ? s - 1.0 : number(args));
  if (head == "gaussian") return gaussian_field(Vec::Zero(dim), args.empty() ? 0.5 : number(args));
  if (head == "constant") return constant_field(dim, args.empty() ? 1.0 : number(args));
  if (head == "halfspace-mode" || head == "remark62") {
    std::vector<double> comps;
    std::stringstream ss(args);
    std::string item;
    while (std::getline(ss, item, ',')) comps.push_back(number(item));
    if (static_cast<int>(comps.size()) != dim - 1)
      throw std::invalid_argument("halfspace-mode needs N-1 tangential components");
    Vec pt(dim - 1);
    for (int k = 0; k < dim - 1; ++k) pt[k] = comps[k];
    if (pt.norm() == 0.0) throw std::invalid_argument("halfspace-mode needs a nonzero tangential vector");
    return halfspace_mode_field(pt, s);
  }
  throw std::invalid_argument("unknown field '" + spec + "'");
}

}  // namespace fracblow
