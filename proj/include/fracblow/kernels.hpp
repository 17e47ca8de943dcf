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
#include <string>
#include <vector>

#include "fracblow/types.hpp"

namespace fracblow {

/// Direction-dependent factor a(q) of a homogeneous kernel a(q)/|z|^{N+2s}.
///
/// Every constructor produces an even function of the direction: patch
/// partitions assign a value to each antipodal pair of patches, tables are
/// symmetrized on construction, and arbitrary callables are checked on
/// antipodal samples and rejected when they are not even.
class Anisotropy {
 public:
  enum class Kind { kConstant, kPatches, kFunction };

  static Anisotropy constant(double value);

  /// a(q) = values[m] where m maximizes |q . centers[m]|.
  static Anisotropy patches(std::vector<Vec> centers, std::vector<double> values);

  /// Sampled directions with nearest-direction lookup. Entries whose
  /// antipode is also listed are averaged with it.
  static Anisotropy from_table(const std::vector<Vec>& directions,
                               const std::vector<double>& values);

  /// Reads a table file: one row per sample, `theta value` for N = 2 and
  /// `theta phi value` (polar, azimuth) for N = 3.
  static Anisotropy from_table_file(const std::string& path, int dim);

  /// Wraps a callable; throws std::invalid_argument if it is not even.
  static Anisotropy from_function(int dim, std::function<double(const Vec&)> fn,
                                  std::string description = "function");

  double operator()(const Vec& q) const;

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::kConstant; }
  double constant_value() const { return constant_; }
  const std::string& description() const { return description_; }

 private:
  Kind kind_ = Kind::kConstant;
  double constant_ = 1.0;
  std::vector<Vec> centers_;
  std::vector<double> values_;
  std::function<double(const Vec&)> fn_;
  std::string description_ = "constant";
};

struct EllipticityBounds {
  double gamma = 1.0;
  double Gamma = 1.0;

  EllipticityBounds() = default;
  EllipticityBounds(double lo, double hi);
};

/// Standard constant making the symbol of -(-Delta)^s equal to -|xi|^{2s}:
/// s 4^s Gamma(N/2 + s) / (pi^{N/2} Gamma(1 - s)).
double normalizing_constant(int dim, double s);

class Kernel {
 public:
  Kernel(int dim, double s, Anisotropy anisotropy, bool normalized = false);

  /// Isotropic kernel |z|^{-(N+2s)}, optionally times C_{N,s}.
  static Kernel isotropic(int dim, double s, bool normalized = false);

  int dim() const { return dim_; }
  double s() const { return s_; }
  bool normalized() const { return normalized_; }
  const Anisotropy& anisotropy() const { return anisotropy_; }

  /// Effective angular factor including the normalizer when enabled.
  double angular(const Vec& q) const { return scale_ * anisotropy_(q); }
  double scale() const { return scale_; }

  double value(const Vec& z) const;

 private:
  int dim_;
  double s_;
  Anisotropy anisotropy_;
  bool normalized_;
  double scale_;
};

inline double kernel_value(const Kernel& k, const Vec& z) { return k.value(z); }

struct EllipticityReport {
  bool ok = true;
  Vec worst_direction;
  double worst_value = 0.0;
};

/// Quasi-uniform unit directions: +-1 in 1D, equispaced angles in 2D,
/// a Fibonacci lattice in 3D.
std::vector<Vec> sphere_directions(int dim, int count);

EllipticityReport check_ellipticity(const Kernel& k, const EllipticityBounds& b, int n_dirs);

/// inf_i sup_j family of kernels sharing N and s.
class KernelFamily {
 public:
  KernelFamily(std::vector<std::vector<Kernel>> members, EllipticityBounds bounds);

  int dim() const { return dim_; }
  double s() const { return s_; }
  std::size_t rows() const { return members_.size(); }
  std::size_t cols() const { return members_.front().size(); }
  const Kernel& at(std::size_t i, std::size_t j) const { return members_[i][j]; }
  const EllipticityBounds& bounds() const { return bounds_; }

 private:
  std::vector<std::vector<Kernel>> members_;
  EllipticityBounds bounds_;
  int dim_;
  double s_;
};

}  // namespace fracblow
