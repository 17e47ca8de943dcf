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

#include "fracblow/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracblow/solver.hpp"

namespace fracblow {

Mesh::Mesh(DomainPtr dom, double delta, double spacing, double grading, double core_fraction)
    : dom_(std::move(dom)), delta_(delta), spacing_(spacing) {
  if (dom_->dim() != 2) throw std::invalid_argument("the solver supports planar domains only");
  if (!(delta > 0.0) || !(spacing > 0.0) || !(grading > 0.0)) throw std::invalid_argument("mesh: delta, spacing and grading must be positive");
  if (!(delta < 0.5 * dom_->inradius())) throw std::invalid_argument("mesh: delta must be below inradius / 2");
  const double t_max = std::min(core_fraction * dom_->inradius(), 0.9 * dom_->reach());
  if (!(t_max > delta + 2.0 * spacing)) throw std::invalid_argument("mesh: delta too large for the ring region");

  const double ratio = 1.0 + grading * spacing;
  rings_.push_back(delta);
  while (rings_.back() < t_max) {
    double t = rings_.back();
    double step = std::min((ratio - 1.0) * t, spacing);
    double next = t + step;
    if (next > t_max - 0.3 * step) next = t_max;
    rings_.push_back(next);
  }

  period_ = dom_->boundary_period();
  angles_ = std::max(8, static_cast<int>(std::ceil(dom_->perimeter() / spacing)));
  const int K = static_cast<int>(rings_.size());
  for (int k = 0; k < K; ++k) {
    double radial = k + 1 < K ? rings_[k + 1] - rings_[k] : rings_[k] - rings_[k - 1];
    double wide = k > 0 ? std::max(radial, rings_[k] - rings_[k - 1]) : radial;
    if (k > 0) radial = std::min(radial, rings_[k] - rings_[k - 1]);
    for (int m = 0; m < angles_; ++m) {
      Vec bp = dom_->boundary_point(m * period_ / angles_);
      Vec bq = dom_->boundary_point((m + 1) * period_ / angles_);
      Vec x = bp + rings_[k] * dom_->inward_normal(bp);
      Vec y = bq + rings_[k] * dom_->inward_normal(bq);
      nodes_.push_back(x);
      dist_.push_back(rings_[k]);
      local_.push_back(std::min(radial, (y - x).norm()));
      cell_.push_back(std::max(wide, (y - x).norm()));
      kind_.push_back(NodeKind::kRing);
    }
  }

  h_ = spacing;
  Vec lo = dom_->bbox_lo(), hi = dom_->bbox_hi();
  origin_ = lo.array() - h_;
  nx_ = static_cast<int>(std::ceil((hi[0] - lo[0]) / h_)) + 3;
  ny_ = static_cast<int>(std::ceil((hi[1] - lo[1]) / h_)) + 3;
  lattice_.assign(static_cast<std::size_t>(nx_) * ny_, -1);
  const double keep = t_max - 1.5 * h_;
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      Vec p(2);
      p << origin_[0] + i * h_, origin_[1] + j * h_;
      double d = dom_->distance(p);
      if (d >= keep && d > delta) {
        lattice_[static_cast<std::size_t>(j) * nx_ + i] = static_cast<int>(nodes_.size());
        nodes_.push_back(p);
        dist_.push_back(d);
        local_.push_back(h_);
        cell_.push_back(h_);
        kind_.push_back(NodeKind::kCore);
      }
    }
  }
}

double Mesh::param01(const Vec& bp) const {
  double t = std::fmod(dom_->boundary_param(bp), period_);
  if (t < 0.0) t += period_;
  return t;
}

double Mesh::spacing_at(const Vec& y) const {
  double d = dom_->distance(y);
  if (d >= t_max()) return h_;
  auto it = std::upper_bound(rings_.begin(), rings_.end(), d);
  std::size_t k = it == rings_.begin() ? 0 : static_cast<std::size_t>(it - rings_.begin()) - 1;
  k = std::min(k, rings_.size() - 2);
  return rings_[k + 1] - rings_[k];
}

void Mesh::interpolate(const Vec& y, std::vector<std::pair<int, double>>& out) const {
  out.clear();
  const double d = dom_->distance(y);
  if (d >= t_max()) {
    double fx = (y[0] - origin_[0]) / h_, fy = (y[1] - origin_[1]) / h_;
    int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    double a = fx - i, b = fy - j;
    if (i >= 0 && j >= 0 && i + 1 < nx_ && j + 1 < ny_) {
      int c00 = lattice_[static_cast<std::size_t>(j) * nx_ + i], c10 = lattice_[static_cast<std::size_t>(j) * nx_ + i + 1];
      int c01 = lattice_[static_cast<std::size_t>(j + 1) * nx_ + i], c11 = lattice_[static_cast<std::size_t>(j + 1) * nx_ + i + 1];
      if (c00 >= 0 && c10 >= 0 && c01 >= 0 && c11 >= 0) {
        out = {{c00, (1 - a) * (1 - b)}, {c10, a * (1 - b)}, {c01, (1 - a) * b}, {c11, a * b}};
        return;
      }
    }
    if (d > t_max() * (1.0 + 1e-9)) throw std::logic_error("mesh: lattice does not cover an interior point");
  }
  const int K = static_cast<int>(rings_.size());
  auto it = std::upper_bound(rings_.begin(), rings_.end(), d);
  int k = it == rings_.begin() ? 0 : static_cast<int>(it - rings_.begin()) - 1;
  k = std::clamp(k, 0, K - 2);
  double alpha = std::clamp((d - rings_[k]) / (rings_[k + 1] - rings_[k]), 0.0, 1.0);
  double theta = param01(dom_->project(y)) / period_ * angles_;
  int m = static_cast<int>(std::floor(theta));
  double beta = theta - m;
  m %= angles_;
  int m1 = (m + 1) % angles_;
  out = {{k * angles_ + m, (1 - alpha) * (1 - beta)},
         {k * angles_ + m1, (1 - alpha) * beta},
         {(k + 1) * angles_ + m, alpha * (1 - beta)},
         {(k + 1) * angles_ + m1, alpha * beta}};
}

double Mesh::interpolate_value(const Vec& y, const double* values) const {
  thread_local std::vector<std::pair<int, double>> w;
  interpolate(y, w);
  double acc = 0.0;
  for (auto [j, a] : w) acc += a * values[j];
  return acc;
}

MeshPtr build_mesh(DomainPtr dom, const SolveConfig& cfg) {
  return std::make_shared<Mesh>(std::move(dom), cfg.delta, cfg.spacing, cfg.grading, cfg.core_fraction);
}

}  // namespace fracblow
