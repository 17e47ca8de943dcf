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

#include "fracblow/geometry.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fracblow/kernels.hpp"

namespace fracblow {

namespace {

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
  auto r = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

}  // namespace

Vec BoundaryFrame::to_global(const Vec& local) const {
  Vec out = origin;
  for (int k = 0; k < dim; ++k) out += local[k] * basis.col(k).head(dim);
  return out;
}

std::vector<double> Domain::ray_boundary_crossings(const Vec& x, const Vec& q) const {
  const double span = (x - center()).norm() + diameter();
  const int steps = 512;
  const double h = span / steps;
  std::vector<double> out;
  bool prev = inside(x);
  for (int k = 1; k <= steps; ++k) {
    double r = k * h;
    bool cur = inside(x + r * q);
    if (cur != prev) {
      auto f = [&](double t) { return inside(x + t * q) == prev ? -1.0 : 1.0; };
      out.push_back(bisect_root(f, r - h, r));
    }
    prev = cur;
  }
  return out;
}

double Domain::ray_level_exit(const Vec& x, const Vec& q, double level) const {
  if (!(distance(x) > level)) return 0.0;
  const double span = (x - center()).norm() + diameter();
  const int steps = 1024;
  const double h = span / steps;
  for (int k = 1; k <= steps; ++k) {
    double r = k * h;
    if (distance(x + r * q) <= level) {
      auto f = [&](double t) { return level - distance(x + t * q); };
      return bisect_root(f, r - h, r);
    }
  }
  return std::numeric_limits<double>::infinity();
}

Vec Domain::boundary_point(double) const {
  throw std::logic_error(name() + ": no boundary parametrization in this dimension");
}

double Domain::boundary_param(const Vec&) const {
  throw std::logic_error(name() + ": no boundary parametrization in this dimension");
}

double Domain::perimeter() const {
  throw std::logic_error(name() + ": perimeter unavailable");
}

double Domain::d_tau(double tau, const Vec& x) const {
  double d = distance(x);
  if (!(d > 0.0)) return 0.0;
  return tau == 0.0 ? 1.0 : std::pow(d, tau);
}

double Domain::smooth_radius(const Vec& x) const {
  double d = distance(x);
  if (!(d > 0.0)) return 0.0;
  return std::max(0.0, std::min(d, reach() - d));
}

BoundaryFrame Domain::boundary_frame(const Vec& x0, double tol) const {
  if (boundary_gap(x0) > tol) throw std::domain_error("boundary_frame: point is not on the boundary");
  BoundaryFrame f;
  f.dim = dim();
  f.origin = x0;
  Vec n = inward_normal(x0);
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
  B.col(dim() - 1).head(dim()) = n;
  int filled = 0;
  for (int axis = 0; axis < dim() && filled < dim() - 1; ++axis) {
    Vec t = unit_vec(dim(), axis);
    t -= t.dot(n) * n;
    for (int k = 0; k < filled; ++k) {
      Vec bk = B.col(k).head(dim());
      t -= t.dot(bk) * bk;
    }
    if (t.norm() < 1e-6) continue;
    B.col(filled).head(dim()) = t.normalized();
    ++filled;
  }
  f.basis = B;
  return f;
}

std::vector<Vec> Domain::sample_boundary(int n) const {
  std::vector<Vec> out;
  if (dim() != 2) throw std::logic_error(name() + ": boundary sampling needs N = 2");
  for (int k = 0; k < n; ++k) out.push_back(boundary_point(boundary_period() * (k + 0.5) / n - (name() == "halfspace" ? 0.5 * boundary_period() : 0.0)));
  return out;
}

std::vector<Vec> Domain::sample_interior(int n, std::uint64_t seed, double dmin, double dmax) const {
  std::mt19937_64 rng(seed);
  Vec lo = bbox_lo(), hi = bbox_hi();
  std::vector<std::uniform_real_distribution<double>> coord;
  for (int i = 0; i < dim(); ++i) coord.emplace_back(lo[i], hi[i]);
  std::vector<Vec> out;
  out.reserve(n);
  std::size_t guard = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++guard > 1000000ull * static_cast<std::size_t>(std::max(n, 1)))
      throw NumericalFailure("sample_interior: acceptance region too thin");
    Vec x(dim());
    for (int i = 0; i < dim(); ++i) x[i] = coord[i](rng);
    double d = distance(x);
    if (d > 0.0 && d >= dmin && d <= dmax) out.push_back(x);
  }
  return out;
}

// ---------------------------------------------------------------- Ball

Ball::Ball(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (center_.size() < 1 || center_.size() > 3) throw std::domain_error("ball dimension must be 1, 2 or 3");
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
}

bool Ball::inside(const Vec& x) const { return (x - center_).squaredNorm() < radius_ * radius_; }

double Ball::distance(const Vec& x) const { return std::max(0.0, radius_ - (x - center_).norm()); }

Vec Ball::project(const Vec& x) const {
  Vec v = x - center_;
  double r = v.norm();
  if (r < 1e-12 * radius_) throw NonUniqueProjection("ball: projection of the center is not unique");
  return center_ + radius_ * v / r;
}

Vec Ball::inward_normal(const Vec& x0) const { return (center_ - x0).normalized(); }

double Ball::boundary_gap(const Vec& x0) const { return std::abs((x0 - center_).norm() - radius_); }

std::vector<double> Ball::ray_boundary_crossings(const Vec& x, const Vec& q) const {
  Vec v = x - center_;
  double b = q.dot(v);
  double c = v.squaredNorm() - radius_ * radius_;
  double disc = b * b - c;
  std::vector<double> out;
  if (disc <= 0.0) return out;
  double sq = std::sqrt(disc);
  // Stable roots of r^2 + 2 b r + c = 0.
  double r1, r2;
  if (b > 0.0) {
    r1 = -b - sq;
    r2 = c / r1;
  } else {
    r2 = -b + sq;
    r1 = c / r2;
  }
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0.0) out.push_back(r1);
  if (r2 > 0.0) out.push_back(r2);
  return out;
}

double Ball::ray_level_exit(const Vec& x, const Vec& q, double level) const {
  if (!(distance(x) > level)) return 0.0;
  Vec v = x - center_;
  double rr = radius_ - level;
  double b = q.dot(v);
  double c = v.squaredNorm() - rr * rr;  // < 0 inside
  double sq = std::sqrt(b * b - c);
  return b > 0.0 ? -c / (b + sq) : -b + sq;
}

Vec Ball::boundary_point(double theta) const {
  if (dim() != 2) return Domain::boundary_point(theta);
  Vec p(2);
  p << std::cos(theta), std::sin(theta);
  return center_ + radius_ * p;
}

double Ball::boundary_param(const Vec& x) const {
  if (dim() != 2) return Domain::boundary_param(x);
  return std::atan2(x[1] - center_[1], x[0] - center_[0]);
}

std::vector<Vec> Ball::sample_boundary(int n) const {
  if (dim() == 2) return Domain::sample_boundary(n);
  std::vector<Vec> out;
  for (const Vec& q : sphere_directions(dim(), n)) out.push_back(center_ + radius_ * q);
  return out;
}

// ---------------------------------------------------------------- HalfSpace

HalfSpace::HalfSpace(Vec normal, double offset, double box_half_width)
    : normal_(normal.normalized()), offset_(offset), box_(box_half_width) {
  if (normal.norm() == 0.0) throw std::invalid_argument("half-space normal must be nonzero");
  if (!(box_half_width > 0.0)) throw std::invalid_argument("half-space box must be positive");
  tangent_ = Vec::Zero(normal_.size());
  if (normal_.size() == 2) tangent_ << normal_[1], -normal_[0];
}

double HalfSpace::distance(const Vec& x) const { return std::max(0.0, x.dot(normal_) - offset_); }

Vec HalfSpace::project(const Vec& x) const { return x - (x.dot(normal_) - offset_) * normal_; }

double HalfSpace::boundary_gap(const Vec& x0) const { return std::abs(x0.dot(normal_) - offset_); }

double HalfSpace::diameter() const { return 2.0 * box_ * std::sqrt(static_cast<double>(dim())); }

std::vector<double> HalfSpace::ray_boundary_crossings(const Vec& x, const Vec& q) const {
  double qn = q.dot(normal_);
  std::vector<double> out;
  if (qn == 0.0) return out;
  double r = (offset_ - x.dot(normal_)) / qn;
  if (r > 0.0) out.push_back(r);
  return out;
}

double HalfSpace::ray_level_exit(const Vec& x, const Vec& q, double level) const {
  double gap = x.dot(normal_) - offset_ - level;
  if (!(gap > 0.0)) return 0.0;
  double qn = q.dot(normal_);
  if (qn >= 0.0) return std::numeric_limits<double>::infinity();
  return gap / -qn;
}

Vec HalfSpace::boundary_point(double t) const {
  if (dim() == 1) return normal_ * offset_;
  if (dim() != 2) return Domain::boundary_point(t);
  return normal_ * offset_ + t * tangent_;
}

double HalfSpace::boundary_param(const Vec& x) const {
  if (dim() == 1) return 0.0;
  if (dim() != 2) return Domain::boundary_param(x);
  return x.dot(tangent_);
}

std::vector<Vec> HalfSpace::sample_boundary(int n) const {
  if (dim() == 2) return Domain::sample_boundary(n);
  throw std::logic_error("halfspace: boundary sampling needs N = 2");
}

Vec HalfSpace::bbox_lo() const { return Vec::Constant(dim(), -box_) + normal_ * (offset_ + box_); }
Vec HalfSpace::bbox_hi() const { return Vec::Constant(dim(), box_) + normal_ * (offset_ + box_); }

// ---------------------------------------------------------------- Superellipse

Superellipse::Superellipse(double a, double b, double p) : a_(a), b_(b), p_(p) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("superellipse semi-axes must be positive");
  if (!(p >= 2.0)) throw std::invalid_argument("superellipse exponent must be >= 2");
  const int n = 4096;
  const double h = 1e-4;
  double min_rc = std::numeric_limits<double>::infinity();
  Vec prev = boundary_point(0.0);
  for (int k = 0; k < n; ++k) {
    double t = 2.0 * kPi * k / n;
    double r = polar_radius(t);
    double rp = (polar_radius(t + h) - polar_radius(t - h)) / (2 * h);
    double rpp = (polar_radius(t + h) - 2 * r + polar_radius(t - h)) / (h * h);
    double kappa = std::abs(r * r + 2 * rp * rp - r * rpp) / std::pow(r * r + rp * rp, 1.5);
    if (kappa > 0.0) min_rc = std::min(min_rc, 1.0 / kappa);
    diameter_ = std::max(diameter_, 2.0 * r);
    Vec cur = boundary_point(2.0 * kPi * (k + 1) / n);
    perimeter_ += (cur - prev).norm();
    prev = cur;
  }
  reach_ = std::min(min_rc, inradius());
}

double Superellipse::level(const Vec& x) const {
  return std::pow(std::abs(x[0] / a_), p_) + std::pow(std::abs(x[1] / b_), p_);
}

double Superellipse::polar_radius(double t) const {
  return std::pow(std::pow(std::abs(std::cos(t) / a_), p_) + std::pow(std::abs(std::sin(t) / b_), p_),
                  -1.0 / p_);
}

Vec Superellipse::boundary_point(double t) const {
  Vec out(2);
  double r = polar_radius(t);
  out << r * std::cos(t), r * std::sin(t);
  return out;
}

double Superellipse::boundary_param(const Vec& x) const { return std::atan2(x[1], x[0]); }

std::pair<double, double> Superellipse::nearest(const Vec& x, bool check_unique) const {
  const int n = 96;
  auto sq = [&](double t) { return (boundary_point(t) - x).squaredNorm(); };
  std::vector<double> vals(n);
  for (int k = 0; k < n; ++k) vals[k] = sq(2.0 * kPi * k / n);
  std::vector<std::pair<double, double>> minima;
  for (int k = 0; k < n; ++k) {
    double v = vals[k];
    if (v <= vals[(k + n - 1) % n] && v <= vals[(k + 1) % n]) {
      double lo = 2.0 * kPi * (k - 1) / n, hi = 2.0 * kPi * (k + 1) / n;
      auto r = boost::math::tools::brent_find_minima(sq, lo, hi, 52);
      minima.emplace_back(r.first, r.second);
    }
  }
  auto best = *std::min_element(minima.begin(), minima.end(),
                                [](auto& l, auto& r) { return l.second < r.second; });
  if (check_unique) {
    for (const auto& m : minima) {
      double dt = std::remainder(m.first - best.first, 2.0 * kPi);
      if (std::abs(dt) > 1e-6 &&
          std::abs(std::sqrt(m.second) - std::sqrt(best.second)) <= 1e-9 * std::max(1.0, std::sqrt(best.second)))
        throw NonUniqueProjection("superellipse: projection is not unique");
    }
  }
  return best;
}

double Superellipse::distance(const Vec& x) const {
  if (!inside(x)) return 0.0;
  return std::sqrt(nearest(x, false).second);
}

Vec Superellipse::project(const Vec& x) const { return boundary_point(nearest(x, true).first); }

Vec Superellipse::inward_normal(const Vec& x0) const {
  Vec g(2);
  g << p_ * std::pow(std::abs(x0[0]), p_ - 1) * (x0[0] < 0 ? -1.0 : 1.0) / std::pow(a_, p_),
      p_ * std::pow(std::abs(x0[1]), p_ - 1) * (x0[1] < 0 ? -1.0 : 1.0) / std::pow(b_, p_);
  return -g.normalized();
}

double Superellipse::boundary_gap(const Vec& x0) const { return std::sqrt(nearest(x0, false).second); }

Vec Superellipse::bbox_lo() const {
  Vec v(2);
  v << -a_, -b_;
  return v;
}

Vec Superellipse::bbox_hi() const {
  Vec v(2);
  v << a_, b_;
  return v;
}

}  // namespace fracblow
