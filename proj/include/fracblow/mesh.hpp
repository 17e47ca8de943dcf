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

#include <memory>
#include <utility>
#include <vector>

#include "fracblow/geometry.hpp"

namespace fracblow {

struct SolveConfig;

/// Interior nodes of a planar domain: rings parallel to the boundary at
/// geometrically growing distances t_0 = delta < t_1 < ... < t_max, and a
/// Cartesian lattice covering {d >= t_max}. Values between nodes are
/// bilinear in (distance, boundary parameter) on the rings and bilinear on
/// the lattice, so every interpolation weight is non-negative and the
/// weights sum to one.
class Mesh {
 public:
  enum class NodeKind { kRing, kCore };

  Mesh(DomainPtr dom, double delta, double spacing, double grading, double core_fraction);

  const Domain& domain() const { return *dom_; }
  DomainPtr domain_ptr() const { return dom_; }
  double delta() const { return delta_; }
  double spacing() const { return spacing_; }
  double t_max() const { return rings_.back(); }
  const std::vector<double>& rings() const { return rings_; }
  int angles() const { return angles_; }

  std::size_t size() const { return nodes_.size(); }
  const Vec& node(std::size_t i) const { return nodes_[i]; }
  double node_distance(std::size_t i) const { return dist_[i]; }
  NodeKind kind(std::size_t i) const { return kind_[i]; }
  /// Smallest distance between neighbouring nodes around node i.
  double local_spacing(std::size_t i) const { return local_[i]; }
  /// Largest side of the interpolation cells around node i.
  double cell_size(std::size_t i) const { return cell_[i]; }
  /// Local spacing at an arbitrary interior point with d >= delta.
  double spacing_at(const Vec& y) const;

  /// Interpolation weights (node, weight) for a point with d(y) >= delta.
  /// At most four entries; weights are >= 0 and sum to 1.
  void interpolate(const Vec& y, std::vector<std::pair<int, double>>& out) const;
  double interpolate_value(const Vec& y, const double* values) const;

 private:
  double param01(const Vec& boundary_point) const;

  DomainPtr dom_;
  double delta_, spacing_;
  std::vector<double> rings_;
  int angles_ = 0;
  double period_ = 0.0;
  std::vector<Vec> nodes_;
  std::vector<double> dist_, local_, cell_;
  std::vector<NodeKind> kind_;
  // Lattice bookkeeping.
  double h_ = 0.0;
  Vec origin_;
  int nx_ = 0, ny_ = 0;
  std::vector<int> lattice_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Validates the layer width against the domain and builds the mesh.
MeshPtr build_mesh(DomainPtr dom, const SolveConfig& cfg);

}  // namespace fracblow
