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

#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fracblow/types.hpp"

namespace fracblow {

class NonUniqueProjection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Orthonormal frame at a boundary point; the last column is the inward normal.
struct BoundaryFrame {
  Vec origin;
  Eigen::Matrix3d basis = Eigen::Matrix3d::Identity();  // top-left N x N block is used
  int dim = 0;

  Vec normal() const { return basis.col(dim - 1).head(dim); }
  Vec tangent(int k) const { return basis.col(k).head(dim); }
  /// Local coordinates (tangential..., normal) -> global point.
  Vec to_global(const Vec& local) const;
};

/// Bounded (or boxed) domain described by its exact distance function.
class Domain {
 public:
  virtual ~Domain() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  virtual bool inside(const Vec& x) const = 0;
  /// dist(x, boundary) for x in the open domain, 0 elsewhere.
  virtual double distance(const Vec& x) const = 0;
  /// Nearest boundary point. Throws NonUniqueProjection at points of the
  /// medial axis.
  virtual Vec project(const Vec& x) const = 0;
  virtual Vec inward_normal(const Vec& boundary_point) const = 0;
  /// |dist(x0, boundary)| for arbitrary x0, used to validate boundary points.
  virtual double boundary_gap(const Vec& x0) const = 0;

  virtual double diameter() const = 0;
  virtual double inradius() const = 0;
  /// Radius of the tubular neighbourhood where the projection is unique.
  virtual double reach() const = 0;
  virtual Vec center() const = 0;

  /// Parameters r > 0 (sorted) where x + r q meets the boundary.
  virtual std::vector<double> ray_boundary_crossings(const Vec& x, const Vec& q) const;
  /// Smallest r > 0 with distance(x + r q) = level, for distance(x) > level.
  /// Returns +inf when the ray stays in {d > level}.
  virtual double ray_level_exit(const Vec& x, const Vec& q, double level) const;

  /// One-parameter boundary description in 2D (polar angle for star-shaped
  /// shapes, tangential coordinate for the half-plane).
  virtual Vec boundary_point(double param) const;
  virtual double boundary_param(const Vec& x) const;
  virtual double boundary_period() const { return 2.0 * kPi; }
  virtual double perimeter() const;

  virtual Vec bbox_lo() const = 0;
  virtual Vec bbox_hi() const = 0;

  double d_tau(double tau, const Vec& x) const;
  bool in_layer(const Vec& x, double delta) const {
    double d = distance(x);
    return d > 0.0 && d < delta;
  }
  /// Radius of a ball around x on which the distance is C^2.
  double smooth_radius(const Vec& x) const;
  BoundaryFrame boundary_frame(const Vec& x0, double tol = 1e-9) const;

  /// Quasi-uniform boundary samples.
  virtual std::vector<Vec> sample_boundary(int n) const;
  /// Deterministic pseudo-random interior samples with dmin <= d <= dmax.
  std::vector<Vec> sample_interior(int n, std::uint64_t seed, double dmin, double dmax) const;
};

using DomainPtr = std::shared_ptr<const Domain>;

class Ball final : public Domain {
 public:
  Ball(Vec center, double radius);

  int dim() const override { return static_cast<int>(center_.size()); }
  std::string name() const override { return "ball"; }
  bool inside(const Vec& x) const override;
  double distance(const Vec& x) const override;
  Vec project(const Vec& x) const override;
  Vec inward_normal(const Vec& x0) const override;
  double boundary_gap(const Vec& x0) const override;
  double diameter() const override { return 2.0 * radius_; }
  double inradius() const override { return radius_; }
  double reach() const override { return radius_; }
  Vec center() const override { return center_; }
  double radius() const { return radius_; }
  std::vector<double> ray_boundary_crossings(const Vec& x, const Vec& q) const override;
  double ray_level_exit(const Vec& x, const Vec& q, double level) const override;
  Vec boundary_point(double param) const override;
  double boundary_param(const Vec& x) const override;
  double perimeter() const override { return 2.0 * kPi * radius_; }
  std::vector<Vec> sample_boundary(int n) const override;
  Vec bbox_lo() const override { return center_.array() - radius_; }
  Vec bbox_hi() const override { return center_.array() + radius_; }

 private:
  Vec center_;
  double radius_;
};

/// {x : x . nu > offset}; the box half-width only sets the nominal size.
class HalfSpace final : public Domain {
 public:
  HalfSpace(Vec normal, double offset, double box_half_width = 10.0);

  int dim() const override { return static_cast<int>(normal_.size()); }
  std::string name() const override { return "halfspace"; }
  bool inside(const Vec& x) const override { return x.dot(normal_) > offset_; }
  double distance(const Vec& x) const override;
  Vec project(const Vec& x) const override;
  Vec inward_normal(const Vec&) const override { return normal_; }
  double boundary_gap(const Vec& x0) const override;
  double diameter() const override;
  double inradius() const override { return box_; }
  double reach() const override { return std::numeric_limits<double>::infinity(); }
  Vec center() const override { return normal_ * (offset_ + box_); }
  std::vector<double> ray_boundary_crossings(const Vec& x, const Vec& q) const override;
  double ray_level_exit(const Vec& x, const Vec& q, double level) const override;
  Vec boundary_point(double param) const override;
  double boundary_param(const Vec& x) const override;
  double boundary_period() const override { return 2.0 * box_; }
  double perimeter() const override { return 2.0 * box_; }
  std::vector<Vec> sample_boundary(int n) const override;
  Vec bbox_lo() const override;
  Vec bbox_hi() const override;

 private:
  Vec normal_;
  Vec tangent_;
  double offset_;
  double box_;
};

/// Planar superellipse |x/a|^p + |y/b|^p < 1 with p >= 2.
class Superellipse final : public Domain {
 public:
  Superellipse(double a, double b, double p);

  int dim() const override { return 2; }
  std::string name() const override { return "superellipse"; }
  bool inside(const Vec& x) const override { return level(x) < 1.0; }
  double distance(const Vec& x) const override;
  Vec project(const Vec& x) const override;
  Vec inward_normal(const Vec& x0) const override;
  double boundary_gap(const Vec& x0) const override;
  double diameter() const override { return diameter_; }
  double inradius() const override { return std::min(a_, b_); }
  double reach() const override { return reach_; }
  Vec center() const override { return Vec::Zero(2); }
  Vec boundary_point(double theta) const override;
  double boundary_param(const Vec& x) const override;
  double perimeter() const override { return perimeter_; }
  Vec bbox_lo() const override;
  Vec bbox_hi() const override;

 private:
  double level(const Vec& x) const;
  double polar_radius(double theta) const;
  // Returns (theta*, squared distance) of the nearest boundary point.
  std::pair<double, double> nearest(const Vec& x, bool check_unique) const;

  double a_, b_, p_;
  double reach_ = 0.0, diameter_ = 0.0, perimeter_ = 0.0;
};

}  // namespace fracblow
