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

#include "fracblow/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "fracblow/nonlocal_eval.hpp"
#include "fracblow/parallel.hpp"
#include "fracblow/quadrature.hpp"

namespace fracblow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Contributions of one direction (both rays +q and -q) to one row, before
// the angular weight and the anisotropy factor are applied.
struct DirContribution {
  std::vector<std::pair<int, double>> entries;
  double b_layer = 0.0, b_ext = 0.0, m_layer = 0.0, m_ext = 0.0;

  void clear() {
    entries.clear();
    b_layer = b_ext = m_layer = m_ext = 0.0;
  }
  void merge_entries() {
    std::sort(entries.begin(), entries.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < entries.size(); ++r) {
      if (w > 0 && entries[w - 1].first == entries[r].first) {
        entries[w - 1].second += entries[r].second;
      } else {
        entries[w++] = entries[r];
      }
    }
    entries.resize(w);
  }
};

class RayAssembler {
 public:
  RayAssembler(const Mesh& mesh, const ProblemData& data, double s, const SolveConfig& cfg)
      : mesh_(mesh), dom_(mesh.domain()), data_(data), s_(s), cfg_(cfg) {
    delta_in_ = mesh.delta() * (1.0 - 1e-9);
    h_min_ = mesh.rings()[1] - mesh.rings()[0];
  }

  DirectionRule rule_for(std::size_t i) const {
    return half_sphere_rule(2, cfg_.sphere_order, boundary_axis_near(dom_, mesh_.node(i)));
  }

  void direction(std::size_t i, const Vec& q, DirContribution& out) const {
    out.clear();
    const Vec& x = mesh_.node(i);
    const double r1 = std::min(cfg_.near_factor * mesh_.cell_size(i), 0.5 * mesh_.node_distance(i));
    const double p = -1.0 - 2.0 * s_;
    const double c_near = std::pow(r1, -2.0 * s_) / (2.0 - 2.0 * s_);
    // Sampling the second difference at r1*sqrt(theta) makes the near
    // integral exact for quartic polynomials along the ray.
    const double theta = (2.0 - 2.0 * s_) / (4.0 - 2.0 * s_);
    const double r_fd = r1 * std::sqrt(theta);
    for (double sign : {1.0, -1.0}) {
      Vec v = sign * q;
      add_point(x + r_fd * v, c_near / theta, out);
      std::vector<double> cross = dom_.ray_boundary_crossings(x, v);
      if (cross.empty()) throw std::logic_error("solver: ray does not leave the domain");
      const double rb = cross.front();
      const double rd = std::min(dom_.ray_level_exit(x, v, delta_in_), rb);
      if (rd > r1) {
        int levels = std::clamp(static_cast<int>(std::ceil(std::log2((rd - r1) / h_min_))) + 1, 1, 30);
        for (auto [r, w] : quad::graded_nodes(r1, rd, levels, cfg_.radial_order, true, true))
          add_point(x + r * v, w * std::pow(r, p), out);
      }
      const double ra = std::max(r1, rd);
      if (rb > ra) {
        auto f = [&](double r) { return layer_value(x + r * v) * std::pow(r, p); };
        out.b_layer += quad::integrate_graded(f, ra, rb, cfg_.layer_levels, std::max(cfg_.radial_order, 4));
        out.m_layer += (std::pow(ra, -2.0 * s_) - std::pow(rb, -2.0 * s_)) / (2.0 * s_);
      }
      const double tail = std::pow(rb, -2.0 * s_);
      out.m_ext += tail / (2.0 * s_);
      if (data_.g) {
        auto g = [&](double t) { return data_.g->value(x + (rb / t) * v) * std::pow(t, 2.0 * s_ - 1.0); };
        out.b_ext += tail * quad::integrate_graded(g, 0.0, 1.0, cfg_.layer_levels, 4);
      }
    }
  }

 private:
  double layer_value(const Vec& y) const {
    double d = dom_.distance(y);
    if (!(d > 0.0)) return 0.0;
    return data_.h(dom_.project(y)) * std::pow(d, s_ - 1.0);
  }

  void add_point(const Vec& y, double w, DirContribution& out) const {
    double d = dom_.distance(y);
    if (d >= delta_in_) {
      thread_local std::vector<std::pair<int, double>> interp;
      mesh_.interpolate(y, interp);
      for (auto [j, a] : interp)
        if (a != 0.0) out.entries.emplace_back(j, w * a);
    } else if (d > 0.0) {
      out.b_layer += w * data_.h(dom_.project(y)) * std::pow(d, s_ - 1.0);
      out.m_layer += w;
    } else {
      out.b_ext += data_.g ? w * data_.g->value(y) : 0.0;
      out.m_ext += w;
    }
  }

  const Mesh& mesh_;
  const Domain& dom_;
  const ProblemData& data_;
  double s_;
  const SolveConfig& cfg_;
  double delta_in_ = 0.0, h_min_ = 0.0;
};

DiscreteOperator empty_operator(MeshPtr mesh, const ProblemData& data) {
  const std::size_t n = mesh->size();
  DiscreteOperator op;
  op.mesh = mesh;
  op.W = RowMatrix::Zero(n, n);
  op.D = Eigen::VectorXd::Zero(n);
  op.b_layer = op.b_exterior = op.layer_mass = op.exterior_mass = Eigen::VectorXd::Zero(n);
  op.f = Eigen::VectorXd::Zero(n);
  if (data.f)
    for (std::size_t i = 0; i < n; ++i) op.f[i] = data.f->value(mesh->node(i));
  return op;
}

void accumulate(DiscreteOperator& op, std::size_t i, double factor, const DirContribution& c) {
  for (auto [j, w] : c.entries) op.W(i, j) += factor * w;
  op.b_layer[i] += factor * c.b_layer;
  op.b_exterior[i] += factor * c.b_ext;
  op.layer_mass[i] += factor * c.m_layer;
  op.exterior_mass[i] += factor * c.m_ext;
}

void finish_row(DiscreteOperator& op, std::size_t i) {
  op.D[i] = op.W.row(i).sum() + op.layer_mass[i] + op.exterior_mass[i];
}

void check_inputs(const Mesh& mesh, const ProblemData& data, const SolveConfig& cfg) {
  cfg.validate();
  if (!data.h) throw std::invalid_argument("problem data needs a boundary function h");
  if (mesh.rings().size() < 2) throw std::invalid_argument("mesh needs at least two rings");
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

void SolveConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("solver: delta must be positive");
  if (!(spacing > 0.0)) throw std::invalid_argument("solver: spacing must be positive");
  if (!(grading > 0.0)) throw std::invalid_argument("solver: grading must be positive");
  if (!(core_fraction > 0.0 && core_fraction < 1.0)) throw std::invalid_argument("solver: core_fraction must lie in (0, 1)");
  if (!(near_factor > 0.0)) throw std::invalid_argument("solver: near_factor must be positive");
  if (sphere_order < 1 || radial_order < 1 || layer_levels < 1) throw std::invalid_argument("solver: orders must be >= 1");
  if (!(linear_tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
  if (max_linear_iterations < 1 || max_policy_iterations < 1) throw std::invalid_argument("solver: iteration budgets must be >= 1");
}

ProblemData ProblemData::constant_trace(double value) {
  ProblemData d;
  d.h = [value](const Vec&) { return value; };
  return d;
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& u) const {
  return W * u - D.cwiseProduct(u) + b_layer + b_exterior;
}

Eigen::VectorXd DiscreteOperator::apply_constant(double c) const {
  Eigen::VectorXd one = Eigen::VectorXd::Constant(D.size(), c);
  return W * one - D * c + (layer_mass + exterior_mass) * c;
}

RowMatrix DiscreteOperator::system_matrix() const {
  RowMatrix A = -W;
  A.diagonal() += D;
  return A;
}

Eigen::VectorXd DiscreteOperator::system_rhs() const { return b_layer + b_exterior - f; }

std::size_t DiscreteOperator::monotonicity_violations() const {
  std::size_t bad = 0;
  for (Eigen::Index i = 0; i < W.rows(); ++i)
    for (Eigen::Index j = 0; j < W.cols(); ++j)
      if (i != j && W(i, j) < 0.0) ++bad;
  return bad;
}

DiscreteOperator assemble(const Kernel& k, MeshPtr mesh, const ProblemData& data, const SolveConfig& cfg) {
  if (k.dim() != 2) throw std::invalid_argument("assemble: planar kernels only");
  auto fam = assemble_family(KernelFamily({{k}}, EllipticityBounds(1e-300, 1e300)), std::move(mesh), data, cfg);
  return std::move(fam[0][0]);
}

std::vector<std::vector<DiscreteOperator>> assemble_family(const KernelFamily& fam, MeshPtr mesh,
                                                           const ProblemData& data, const SolveConfig& cfg) {
  check_inputs(*mesh, data, cfg);
  std::vector<std::vector<DiscreteOperator>> ops(fam.rows());
  for (std::size_t a = 0; a < fam.rows(); ++a)
    for (std::size_t b = 0; b < fam.cols(); ++b) ops[a].push_back(empty_operator(mesh, data));
  RayAssembler ray(*mesh, data, fam.s(), cfg);
  parallel_for(mesh->size(), [&](std::size_t i) {
    DirectionRule rule = ray.rule_for(i);
    DirContribution c;
    for (std::size_t k = 0; k < rule.q.size(); ++k) {
      ray.direction(i, rule.q[k], c);
      for (std::size_t a = 0; a < fam.rows(); ++a)
        for (std::size_t b = 0; b < fam.cols(); ++b)
          accumulate(ops[a][b], i, rule.w[k] * fam.at(a, b).angular(rule.q[k]), c);
    }
    for (auto& row : ops)
      for (auto& op : row) finish_row(op, i);
  });
  for (auto& row : ops)
    for (auto& op : row) {
      std::size_t bad = op.monotonicity_violations();
      if (bad > 0) {
        for (Eigen::Index i = 0; i < op.W.rows(); ++i)
          if ((op.W.row(i).array() < 0.0).any())
            throw NumericalFailure("assemble: negative off-diagonal weight in row " + std::to_string(i));
      }
    }
  return ops;
}

SolveReport solve_linear_system(const RowMatrix& A, const Eigen::VectorXd& rhs, const SolveConfig& cfg,
                                const Eigen::VectorXd* initial) {
  auto t0 = Clock::now();
  SolveReport rep;
  const Eigen::Index n = rhs.size();
  Eigen::VectorXd x = initial ? *initial : Eigen::VectorXd::Zero(n);
  const double scale = inf_norm(rhs);
  if (scale == 0.0) {
    rep.u = Eigen::VectorXd::Zero(n);
    rep.converged = true;
    rep.seconds = seconds_since(t0);
    return rep;
  }
  const double tol = cfg.linear_tolerance;
  Eigen::VectorXd diag = A.diagonal();
  if ((diag.array() <= 0.0).any()) throw NumericalFailure("linear solve: non-positive diagonal");
  Eigen::VectorXd r = rhs - A * x;
  if (cfg.method == LinearMethod::kGaussSeidel) {
    for (int it = 0; it < cfg.max_linear_iterations; ++it) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double sigma = rhs[i] - A.row(i).dot(x) + diag[i] * x[i];
        x[i] += cfg.relaxation * (sigma / diag[i] - x[i]);
      }
      r = rhs - A * x;
      rep.residual_history.push_back(inf_norm(r) / scale);
      rep.iterations = it + 1;
      if (rep.residual_history.back() <= tol) break;
    }
  } else {
    Eigen::VectorXd inv = diag.cwiseInverse();
    Eigen::VectorXd rhat = r, p = Eigen::VectorXd::Zero(n), v = Eigen::VectorXd::Zero(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 0; it < cfg.max_linear_iterations; ++it) {
      rep.iterations = it + 1;
      double rho_new = rhat.dot(r);
      if (rho_new == 0.0 || omega == 0.0) {
        rhat = r;
        p.setZero();
        v.setZero();
        rho = alpha = omega = 1.0;
        rho_new = rhat.dot(r);
        if (rho_new == 0.0) break;
      }
      double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      p = r + beta * (p - omega * v);
      Eigen::VectorXd y = inv.cwiseProduct(p);
      v = A * y;
      alpha = rho / rhat.dot(v);
      x += alpha * y;
      Eigen::VectorXd s = r - alpha * v;
      if (inf_norm(s) / scale <= tol) {
        r = s;
        rep.residual_history.push_back(inf_norm(r) / scale);
        break;
      }
      Eigen::VectorXd z = inv.cwiseProduct(s);
      Eigen::VectorXd t = A * z;
      double tt = t.squaredNorm();
      omega = tt > 0.0 ? t.dot(s) / tt : 0.0;
      x += omega * z;
      r = s - omega * t;
      rep.residual_history.push_back(inf_norm(r) / scale);
      if (rep.residual_history.back() <= tol) break;
    }
  }
  rep.max_residual = inf_norm(rhs - A * x) / scale;
  rep.converged = rep.max_residual <= tol * 10.0;
  rep.u = std::move(x);
  rep.seconds = seconds_since(t0);
  if (!rep.converged)
    throw NumericalFailure("linear solve did not converge: residual " + std::to_string(rep.max_residual) +
                           " after " + std::to_string(rep.iterations) + " iterations");
  return rep;
}

SolveReport solve_linear(const DiscreteOperator& op, const SolveConfig& cfg, const Eigen::VectorXd* initial) {
  return solve_linear_system(op.system_matrix(), op.system_rhs(), cfg, initial);
}

namespace {

struct Policy {
  std::vector<int> choice;  // encoded per row
  bool operator<(const Policy& o) const { return choice < o.choice; }
};

}  // namespace

SolveReport solve_isaacs(const std::vector<std::vector<DiscreteOperator>>& ops, const SolveConfig& cfg) {
  if (ops.empty() || ops.front().empty()) throw std::invalid_argument("solve_isaacs: empty family");
  auto t0 = Clock::now();
  const std::size_t I = ops.size(), J = ops.front().size();
  const std::size_t n = ops[0][0].size();
  const Eigen::VectorXd& f = ops[0][0].f;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  std::set<std::vector<int>> seen;
  std::vector<int> policy(n, -1);
  SolveReport rep;
  double scale = 0.0;
  for (const auto& row : ops)
    for (const auto& op : row) scale = std::max(scale, inf_norm(op.system_rhs()));
  scale = std::max(scale, 1e-300);
  const double tie_tol = 100.0 * cfg.linear_tolerance * scale;
  for (int it = 0; it < cfg.max_policy_iterations; ++it) {
    std::vector<Eigen::VectorXd> F(I * J);
    for (std::size_t a = 0; a < I; ++a)
      for (std::size_t b = 0; b < J; ++b) F[a * J + b] = ops[a][b].apply(u);
    std::vector<int> next(n);
    double residual = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      int best = -1;
      double best_val = 0.0;
      for (std::size_t a = 0; a < I; ++a) {
        int arg = static_cast<int>(a * J);
        double mx = F[a * J][r];
        for (std::size_t b = 1; b < J; ++b)
          if (F[a * J + b][r] > mx) {
            mx = F[a * J + b][r];
            arg = static_cast<int>(a * J + b);
          }
        if (best < 0 || mx < best_val) {
          best = arg;
          best_val = mx;
        }
      }
      // Near-ties keep the current control so rounding noise cannot flip it.
      if (policy[r] >= 0 && std::abs(F[policy[r]][r] - best_val) <= tie_tol) best = policy[r];
      next[r] = best;
      residual = std::max(residual, std::abs(best_val - f[r]));
    }
    residual /= scale;
    int changes = 0;
    for (std::size_t r = 0; r < n; ++r) changes += next[r] != policy[r];
    if (it > 0) {
      rep.policy_residuals.push_back(residual);
      rep.policy_changes.push_back(changes);
    }
    if (it > 0 && (changes == 0 || residual <= 100.0 * cfg.linear_tolerance)) {
      rep.converged = true;
      rep.max_residual = residual;
      break;
    }
    if (!seen.insert(next).second)
      throw NumericalFailure("policy iteration cycles after " + std::to_string(it) + " iterations");
    policy = next;
    RowMatrix A(n, n);
    Eigen::VectorXd rhs(n);
    for (std::size_t r = 0; r < n; ++r) {
      const DiscreteOperator& op = ops[policy[r] / J][policy[r] % J];
      A.row(r) = -op.W.row(r);
      A(r, r) += op.D[r];
      rhs[r] = op.b_layer[r] + op.b_exterior[r] - op.f[r];
    }
    SolveReport inner = solve_linear_system(A, rhs, cfg, &u);
    u = inner.u;
    rep.iterations = it + 1;
    rep.residual_history.insert(rep.residual_history.end(), inner.residual_history.begin(),
                                inner.residual_history.end());
  }
  if (!rep.converged) throw NumericalFailure("policy iteration did not converge within the budget");
  rep.u = u;
  rep.seconds = seconds_since(t0);
  return rep;
}

SolveReport solve_pucci(const EllipticityBounds& bounds, bool plus, double s, MeshPtr mesh, const ProblemData& data,
                        const SolveConfig& cfg) {
  check_inputs(*mesh, data, cfg);
  auto t0 = Clock::now();
  const std::size_t n = mesh->size();
  RayAssembler ray(*mesh, data, s, cfg);
  struct DirRow {
    double w;
    DirContribution c;
  };
  std::vector<std::vector<DirRow>> rows(n);
  std::size_t stored = 0;
  parallel_for(n, [&](std::size_t i) {
    DirectionRule rule = ray.rule_for(i);
    for (std::size_t k = 0; k < rule.q.size(); ++k) {
      DirRow d{rule.w[k], {}};
      ray.direction(i, rule.q[k], d.c);
      d.c.merge_entries();
      rows[i].push_back(std::move(d));
    }
  });
  for (const auto& r : rows)
    for (const auto& d : r) stored += d.c.entries.size();
  if (stored > 200'000'000) throw std::invalid_argument("solve_pucci: mesh too large for directional storage");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  if (data.f)
    for (std::size_t i = 0; i < n; ++i) f[i] = data.f->value(mesh->node(i));
  const double up = plus ? bounds.Gamma : bounds.gamma, down = plus ? bounds.gamma : bounds.Gamma;
  auto psi = [&](const DirRow& d, std::size_t i, const Eigen::VectorXd& u) {
    double acc = d.c.b_layer + d.c.b_ext, mass = d.c.m_layer + d.c.m_ext;
    for (auto [j, w] : d.c.entries) {
      acc += w * u[j];
      mass += w;
    }
    return acc - mass * u[i];
  };
  SolveReport rep;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  std::vector<std::vector<char>> policy(n);
  std::set<std::vector<std::vector<char>>> seen;
  for (int it = 0; it < cfg.max_policy_iterations; ++it) {
    std::vector<std::vector<char>> next(n);
    int changes = 0;
    double residual = 0.0, scale = 1e-300;
    for (std::size_t i = 0; i < n; ++i) {
      double val = 0.0;
      for (const DirRow& d : rows[i]) {
        double p = psi(d, i, u);
        // 1 selects the coefficient applied to positive parts.
        char c = p > 0.0 ? 1 : 0;
        next[i].push_back(c);
        val += d.w * (p > 0.0 ? up * p : down * p);
        scale = std::max(scale, std::abs(d.w * (d.c.b_layer + d.c.b_ext)));
      }
      if (it > 0)
        for (std::size_t k = 0; k < next[i].size(); ++k) changes += next[i][k] != policy[i][k];
      residual = std::max(residual, std::abs(val - f[i]));
    }
    if (it > 0) {
      rep.policy_changes.push_back(changes);
      rep.policy_residuals.push_back(residual / scale);
      if (changes == 0) {
        rep.converged = true;
        rep.max_residual = residual / scale;
        break;
      }
    }
    if (!seen.insert(next).second) throw NumericalFailure("Pucci policy iteration cycles");
    policy = next;
    RowMatrix A = RowMatrix::Zero(n, n);
    Eigen::VectorXd rhs = -f;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < rows[i].size(); ++k) {
        const DirRow& d = rows[i][k];
        double a = d.w * (policy[i][k] ? up : down);
        double mass = d.c.m_layer + d.c.m_ext;
        for (auto [j, w] : d.c.entries) {
          A(i, j) -= a * w;
          mass += w;
        }
        A(i, i) += a * mass;
        rhs[i] += a * (d.c.b_layer + d.c.b_ext);
      }
    }
    SolveReport inner = solve_linear_system(A, rhs, cfg, &u);
    u = inner.u;
    rep.iterations = it + 1;
  }
  if (!rep.converged) throw NumericalFailure("Pucci policy iteration did not converge within the budget");
  rep.u = u;
  rep.seconds = seconds_since(t0);
  return rep;
}

DiscreteSolution::DiscreteSolution(MeshPtr mesh, Eigen::VectorXd values, double s, ProblemData data)
    : mesh_(std::move(mesh)), values_(std::move(values)), s_(s), data_(std::move(data)) {
  if (static_cast<std::size_t>(values_.size()) != mesh_->size())
    throw std::invalid_argument("DiscreteSolution: value count does not match the mesh");
}

double DiscreteSolution::operator()(const Vec& y) const {
  const Domain& dom = mesh_->domain();
  double d = dom.distance(y);
  if (d >= mesh_->delta() * (1.0 - 1e-9)) return mesh_->interpolate_value(y, values_.data());
  if (d > 0.0) return data_.h(dom.project(y)) * std::pow(d, s_ - 1.0);
  return data_.g ? data_.g->value(y) : 0.0;
}

double DiscreteSolution::difference_step(const Vec& y) const {
  double d = mesh_->domain().distance(y);
  if (d >= mesh_->delta()) return std::min(mesh_->spacing_at(y), d / 10.0);
  return d / 10.0;
}

DiscreteSolution solve(const Kernel& k, DomainPtr dom, const ProblemData& data, const SolveConfig& cfg,
                       SolveReport* report) {
  auto t0 = Clock::now();
  MeshPtr mesh = build_mesh(std::move(dom), cfg);
  DiscreteOperator op = assemble(k, mesh, data, cfg);
  SolveReport rep = solve_linear(op, cfg);
  rep.seconds = seconds_since(t0);
  DiscreteSolution sol(mesh, rep.u, k.s(), data);
  if (report) *report = std::move(rep);
  return sol;
}

ConvergenceTable shrink_and_refine(const Kernel& k, DomainPtr dom, const ProblemData& data,
                                   const std::vector<double>& deltas, const SolveConfig& cfg,
                                   const std::vector<Vec>& probes,
                                   const std::function<double(const Vec&)>& reference) {
  ConvergenceTable table;
  for (std::size_t m = 1; m < deltas.size(); ++m)
    if (!(deltas[m] < deltas[m - 1])) throw std::invalid_argument("shrink_and_refine: deltas must decrease");
  for (double delta : deltas) {
    SolveConfig c = cfg;
    c.delta = delta;
    c.spacing = cfg.spacing * std::pow(delta / deltas.front(), cfg.spacing_exponent);
    SolveReport rep;
    DiscreteSolution sol = solve(k, dom, data, c, &rep);
    std::vector<double> vals;
    double err = 0.0;
    for (const Vec& p : probes) {
      double v = sol(p);
      vals.push_back(v);
      if (reference) {
        double ref = reference(p);
        err = std::max(err, std::abs(v - ref) / std::max(std::abs(ref), 1e-300));
      }
    }
    if (!table.probe_values.empty()) {
      const auto& prev = table.probe_values.back();
      double diff = 0.0, mag = 1e-300;
      for (std::size_t j = 0; j < vals.size(); ++j) {
        diff = std::max(diff, std::abs(vals[j] - prev[j]));
        mag = std::max(mag, std::abs(vals[j]));
      }
      table.differences.push_back(diff / mag);
    }
    table.deltas.push_back(delta);
    table.spacings.push_back(c.spacing);
    table.node_counts.push_back(sol.mesh().size());
    table.probe_values.push_back(std::move(vals));
    if (reference) table.errors.push_back(err);
    table.seconds.push_back(rep.seconds);
  }
  return table;
}

}  // namespace fracblow
