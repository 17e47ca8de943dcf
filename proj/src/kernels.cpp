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

#include "fracblow/kernels.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace fracblow {

Anisotropy Anisotropy::constant(double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("anisotropy must be nonnegative");
  Anisotropy a;
  a.kind_ = Kind::kConstant;
  a.constant_ = value;
  a.description_ = "constant";
  return a;
}

Anisotropy Anisotropy::patches(std::vector<Vec> centers, std::vector<double> values) {
  if (centers.empty() || centers.size() != values.size())
    throw std::invalid_argument("patch anisotropy needs one value per center");
  for (auto& c : centers) {
    double n = c.norm();
    if (n == 0.0) throw std::invalid_argument("patch center must be nonzero");
    c /= n;
  }
  for (double v : values)
    if (!(v >= 0.0)) throw std::invalid_argument("anisotropy must be nonnegative");
  Anisotropy a;
  a.kind_ = Kind::kPatches;
  a.centers_ = std::move(centers);
  a.values_ = std::move(values);
  a.description_ = "patches";
  return a;
}

Anisotropy Anisotropy::from_table(const std::vector<Vec>& directions,
                                  const std::vector<double>& values) {
  if (directions.empty() || directions.size() != values.size())
    throw std::invalid_argument("anisotropy table needs one value per direction");
  std::vector<Vec> centers;
  std::vector<double> merged;
  std::vector<bool> used(directions.size(), false);
  for (std::size_t m = 0; m < directions.size(); ++m) {
    if (used[m]) continue;
    Vec dm = directions[m].normalized();
    double sum = values[m];
    int count = 1;
    for (std::size_t k = m + 1; k < directions.size(); ++k) {
      if (used[k]) continue;
      Vec dk = directions[k].normalized();
      if ((dm + dk).norm() < 1e-9 || (dm - dk).norm() < 1e-9) {
        sum += values[k];
        ++count;
        used[k] = true;
      }
    }
    centers.push_back(dm);
    merged.push_back(sum / count);
  }
  Anisotropy a = patches(std::move(centers), std::move(merged));
  a.description_ = "table";
  return a;
}

Anisotropy Anisotropy::from_table_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open anisotropy table: " + path);
  std::vector<Vec> dirs;
  std::vector<double> vals;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::vector<double> nums;
    double x;
    while (row >> x) nums.push_back(x);
    if (nums.empty()) continue;
    if (dim == 2 && nums.size() == 2) {
      Vec q(2);
      q << std::cos(nums[0]), std::sin(nums[0]);
      dirs.push_back(q);
      vals.push_back(nums[1]);
    } else if (dim == 3 && nums.size() == 3) {
      Vec q(3);
      q << std::sin(nums[0]) * std::cos(nums[1]), std::sin(nums[0]) * std::sin(nums[1]),
          std::cos(nums[0]);
      dirs.push_back(q);
      vals.push_back(nums[2]);
    } else {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected angle coordinates followed by a value");
    }
  }
  return from_table(dirs, vals);
}

Anisotropy Anisotropy::from_function(int dim, std::function<double(const Vec&)> fn,
                                     std::string description) {
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < 1000; ++k) {
    Vec q(dim);
    for (int i = 0; i < dim; ++i) q[i] = gauss(rng);
    q.normalize();
    double a = fn(q), b = fn(-q);
    if (!(a >= 0.0) || !(b >= 0.0))
      throw std::invalid_argument("anisotropy must be nonnegative");
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
      throw std::invalid_argument("anisotropy '" + description + "' is not even");
  }
  Anisotropy an;
  an.kind_ = Kind::kFunction;
  an.fn_ = std::move(fn);
  an.description_ = std::move(description);
  return an;
}

double Anisotropy::operator()(const Vec& q) const {
  switch (kind_) {
    case Kind::kConstant:
      return constant_;
    case Kind::kPatches: {
      std::size_t best = 0;
      double best_dot = -1.0;
      for (std::size_t m = 0; m < centers_.size(); ++m) {
        double d = std::abs(q.dot(centers_[m]));
        if (d > best_dot) {
          best_dot = d;
          best = m;
        }
      }
      return values_[best];
    }
    case Kind::kFunction:
      return fn_(q);
  }
  return 0.0;
}

EllipticityBounds::EllipticityBounds(double lo, double hi) : gamma(lo), Gamma(hi) {
  if (!(lo > 0.0) || !(hi >= lo))
    throw std::invalid_argument("ellipticity bounds need 0 < gamma <= Gamma");
}

double normalizing_constant(int dim, double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("order s must lie in (0,1)");
  if (dim < 1) throw std::domain_error("dimension must be positive");
  const double n = dim;
  return s * std::pow(4.0, s) * std::tgamma(n / 2.0 + s) /
         (std::pow(kPi, n / 2.0) * std::tgamma(1.0 - s));
}

Kernel::Kernel(int dim, double s, Anisotropy anisotropy, bool normalized)
    : dim_(dim), s_(s), anisotropy_(std::move(anisotropy)), normalized_(normalized) {
  if (dim < 1 || dim > 3) throw std::domain_error("supported dimensions are 1, 2, 3");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("order s must lie in (0,1)");
  scale_ = normalized ? normalizing_constant(dim, s) : 1.0;
}

Kernel Kernel::isotropic(int dim, double s, bool normalized) {
  return Kernel(dim, s, Anisotropy::constant(1.0), normalized);
}

double Kernel::value(const Vec& z) const {
  const double r = z.norm();
  if (r == 0.0) throw std::domain_error("kernel is singular at the origin");
  return angular(z / r) * std::pow(r, -(dim_ + 2.0 * s_));
}

std::vector<Vec> sphere_directions(int dim, int count) {
  std::vector<Vec> out;
  if (count < 1) return out;
  if (dim == 1) {
    for (int k = 0; k < count; ++k) out.push_back(Vec::Constant(1, k % 2 == 0 ? 1.0 : -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double t = 2.0 * kPi * (k + 0.5) / count;
      Vec q(2);
      q << std::cos(t), std::sin(t);
      out.push_back(q);
    }
  } else {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec q(3);
      q << r * std::cos(golden * k), r * std::sin(golden * k), z;
      out.push_back(q);
    }
  }
  return out;
}

EllipticityReport check_ellipticity(const Kernel& k, const EllipticityBounds& b, int n_dirs) {
  if (n_dirs < 1) throw std::invalid_argument("n_dirs must be >= 1");
  EllipticityReport rep;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (const Vec& q : sphere_directions(k.dim(), n_dirs)) {
    double a = k.angular(q);
    double margin = std::min(a - b.gamma, b.Gamma - a);
    if (margin < worst_margin) {
      worst_margin = margin;
      rep.worst_direction = q;
      rep.worst_value = a;
    }
  }
  // Absolute slack for values sitting exactly on a bound.
  rep.ok = worst_margin >= -1e-12 * std::max(1.0, b.Gamma);
  return rep;
}

KernelFamily::KernelFamily(std::vector<std::vector<Kernel>> members, EllipticityBounds bounds)
    : members_(std::move(members)), bounds_(bounds) {
  if (members_.empty() || members_.front().empty())
    throw std::invalid_argument("kernel family index sets must be nonempty");
  dim_ = members_[0][0].dim();
  s_ = members_[0][0].s();
  for (const auto& row : members_) {
    if (row.size() != members_.front().size())
      throw std::invalid_argument("kernel family must be rectangular");
    for (const auto& k : row) {
      if (k.dim() != dim_ || k.s() != s_)
        throw std::invalid_argument("family members must share N and s");
      auto rep = check_ellipticity(k, bounds_, 512);
      if (!rep.ok) throw std::invalid_argument("family member violates the ellipticity bounds");
    }
  }
}

}  // namespace fracblow
