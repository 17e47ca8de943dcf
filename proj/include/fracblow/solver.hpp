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

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "fracblow/fields.hpp"
#include "fracblow/kernels.hpp"
#include "fracblow/mesh.hpp"

namespace fracblow {

enum class LinearMethod { kBiCGSTAB, kGaussSeidel };

struct SolveConfig {
  double delta = 0.05;         // layer width; the equation is imposed on d >= delta
  double spacing = 0.05;       // angular node spacing and core lattice step
  double grading = 2.0;        // ring ratio 1 + grading * spacing
  double core_fraction = 0.5;  // rings stop at core_fraction * inradius
  double near_factor = 2.0;    // near-field radius / local cell size
  int sphere_order = 32;
  int radial_order = 3;
  int layer_levels = 20;
  int max_policy_iterations = 50;
  double linear_tolerance = 1e-11;  // relative residual
  int max_linear_iterations = 5000;
  LinearMethod method = LinearMethod::kBiCGSTAB;
  double relaxation = 1.0;       // Gauss-Seidel over-relaxation
  double spacing_exponent = 1.0;  // shrink_and_refine: spacing ~ delta^exponent

  void validate() const;
};

/// Dirichlet data: u = h(project(x)) d(x)^{s-1} on the layer, u = g outside,
/// and the equation I u = f on {d >= delta}.
struct ProblemData {
  std::function<double(const Vec&)> h;  // evaluated at boundary points
  FieldPtr f;                           // nullptr means 0
  FieldPtr g;                           // nullptr means 0

  static ProblemData constant_trace(double value);
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row i reads sum_j W_ij u_j - D_i u_i + b_i, where D_i is the total kernel
/// mass of the row: D = W 1 + layer_mass + exterior_mass.
struct DiscreteOperator {
  MeshPtr mesh;
  RowMatrix W;
  Eigen::VectorXd D;
  Eigen::VectorXd b_layer, b_exterior;
  Eigen::VectorXd layer_mass, exterior_mass;
  Eigen::VectorXd f;

  std::size_t size() const { return static_cast<std::size_t>(D.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  /// Row values for u = c on nodes, layer and exterior.
  Eigen::VectorXd apply_constant(double c) const;
  RowMatrix system_matrix() const;
  Eigen::VectorXd system_rhs() const;
  /// Number of entries of the system matrix off the diagonal that are positive.
  std::size_t monotonicity_violations() const;
};

DiscreteOperator assemble(const Kernel& k, MeshPtr mesh, const ProblemData& data, const SolveConfig& cfg);
/// One operator per family member, sharing the ray geometry.
std::vector<std::vector<DiscreteOperator>> assemble_family(const KernelFamily& fam, MeshPtr mesh,
                                                           const ProblemData& data, const SolveConfig& cfg);

struct SolveReport {
  Eigen::VectorXd u;
  std::vector<double> residual_history;
  int iterations = 0;
  double max_residual = 0.0;
  double seconds = 0.0;
  std::vector<int> policy_changes;  // per policy iteration
  std::vector<double> policy_residuals;
  bool converged = false;
};

SolveReport solve_linear(const DiscreteOperator& op, const SolveConfig& cfg,
                         const Eigen::VectorXd* initial = nullptr);
/// Same operator, different affine term (layer data scaled, new rhs).
SolveReport solve_linear_system(const RowMatrix& A, const Eigen::VectorXd& rhs, const SolveConfig& cfg,
                                const Eigen::VectorXd* initial = nullptr);

SolveReport solve_isaacs(const std::vector<std::vector<DiscreteOperator>>& ops, const SolveConfig& cfg);

/// Extremal equation M^+ u = f (plus) or M^- u = f with direction-wise
/// policies; memory grows like nodes x directions x stencil, so it is meant
/// for small meshes.
SolveReport solve_pucci(const EllipticityBounds& b, bool plus, double s, MeshPtr mesh, const ProblemData& data,
                        const SolveConfig& cfg);

/// Node values extended to R^2 through the mesh interpolation, the layer
/// prescription and the exterior data.
class DiscreteSolution {
 public:
  DiscreteSolution(MeshPtr mesh, Eigen::VectorXd values, double s, ProblemData data);

  double operator()(const Vec& y) const;
  const Mesh& mesh() const { return *mesh_; }
  MeshPtr mesh_ptr() const { return mesh_; }
  const Eigen::VectorXd& values() const { return values_; }
  double s() const { return s_; }
  const ProblemData& data() const { return data_; }
  /// Step for centered differences at y: min(local spacing, d / 10).
  double difference_step(const Vec& y) const;

 private:
  MeshPtr mesh_;
  Eigen::VectorXd values_;
  double s_;
  ProblemData data_;
};

DiscreteSolution solve(const Kernel& k, DomainPtr dom, const ProblemData& data, const SolveConfig& cfg,
                       SolveReport* report = nullptr);

struct ConvergenceTable {
  std::vector<double> deltas, spacings;
  std::vector<std::size_t> node_counts;
  std::vector<std::vector<double>> probe_values;
  std::vector<double> differences;  // sup over probes between consecutive runs
  std::vector<double> errors;       // sup relative error vs the reference, if given
  std::vector<double> seconds;
};

ConvergenceTable shrink_and_refine(const Kernel& k, DomainPtr dom, const ProblemData& data,
                                   const std::vector<double>& deltas, const SolveConfig& cfg,
                                   const std::vector<Vec>& probes,
                                   const std::function<double(const Vec&)>& reference = {});

}  // namespace fracblow
