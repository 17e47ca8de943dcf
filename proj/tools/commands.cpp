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


#include "commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "fracblow/analysis.hpp"
#include "fracblow/barriers.hpp"
#include "fracblow/config.hpp"
#include "fracblow/fields.hpp"
#include "fracblow/geometry.hpp"
#include "fracblow/kernels.hpp"
#include "fracblow/nonlocal_eval.hpp"
#include "fracblow/solver.hpp"

namespace fracblow::cli {

namespace {

using json = nlohmann::ordered_json;

const Config::Schema kSchema = {
    {"", {"seed"}},
    {"domain", {"shape", "center", "radius", "normal", "offset", "box", "a", "b", "p"}},
    {"kernel", {"N", "s", "anisotropy", "value", "normalized"}},
    {"family", {"members", "gamma", "Gamma"}},
    {"data", {"h", "f", "g"}},
    {"solver",
     {"operator", "delta", "spacing", "grading", "core_fraction", "near_factor", "sphere_order", "radial_order",
      "layer_levels", "tolerance", "max_iterations", "max_policy_iterations", "method", "relaxation", "deltas",
      "spacing_exponent", "gamma", "Gamma"}},
    {"quadrature", {"r_near", "R_far", "near_levels", "sphere_order", "radial_order", "tail", "estimate_error"}},
    {"barriers",
     {"tau", "beta", "delta0", "anchors", "eta_levels", "cert_points", "margin", "layer_min", "layer_max", "gamma",
      "Gamma", "max_doublings", "modulus_samples", "holder_alpha"}},
    {"analysis",
     {"field", "band_min", "band_max", "samples", "rays", "distances", "tau", "alpha", "x0", "z", "rho", "s_values",
      "p"}},
    {"output", {"prefix"}},
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

Config load_config(const CommonOptions& common) {
  Config cfg = common.config_path.empty() ? Config::parse_string("", "<defaults>") : Config::load(common.config_path);
  for (const std::string& o : common.overrides) cfg.override_with(o);
  cfg.check_schema(kSchema);
  return cfg;
}

std::filesystem::path output_path(const CommonOptions& common, const Config& cfg, const std::string& name) {
  std::filesystem::path dir(common.out_dir.empty() ? "." : common.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  return dir / (cfg.get_string("output", "prefix", "") + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from(const std::vector<double>& v, int dim, const std::string& what) {
  if (static_cast<int>(v.size()) != dim) throw ConfigError(what + ": expected " + std::to_string(dim) + " coordinates");
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = v[i];
  return x;
}

Vec parse_point(const std::string& text, int dim) {
  std::vector<double> vals;
  std::string t = text;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::string item;
  while (in >> item) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("bad point '" + text + "'");
    vals.push_back(v);
  }
  return vec_from(vals, dim, "point '" + text + "'");
}

int kernel_dim(const Config& cfg) {
  int N = cfg.get_int("kernel", "N", 2);
  if (N < 1 || N > 3) throw ConfigError(cfg.where("kernel", "N") + ": N must be 1, 2 or 3");
  return N;
}

double kernel_s(const Config& cfg) {
  double s = cfg.get_double("kernel", "s", 0.5);
  if (!(s > 0.0 && s < 1.0)) throw ConfigError(cfg.where("kernel", "s") + ": s must lie in (0, 1)");
  return s;
}

DomainPtr make_domain(const Config& cfg, int dim) {
  std::string shape = cfg.get_string("domain", "shape", "ball");
  if (shape == "ball") {
    Vec c = vec_from(cfg.get_doubles("domain", "center", std::vector<double>(dim, 0.0)), dim, "domain.center");
    return std::make_shared<Ball>(c, cfg.get_double("domain", "radius", 1.0));
  }
  if (shape == "halfspace") {
    std::vector<double> e(dim, 0.0);
    e[dim - 1] = 1.0;
    Vec n = vec_from(cfg.get_doubles("domain", "normal", e), dim, "domain.normal");
    return std::make_shared<HalfSpace>(n, cfg.get_double("domain", "offset", 0.0), cfg.get_double("domain", "box", 10.0));
  }
  if (shape == "superellipse") {
    if (dim != 2) throw ConfigError("superellipse domains need N = 2");
    return std::make_shared<Superellipse>(cfg.get_double("domain", "a", 1.0), cfg.get_double("domain", "b", 1.0),
                                          cfg.get_double("domain", "p", 4.0));
  }
  throw ConfigError(cfg.where("domain", "shape") + ": unknown shape '" + shape + "'");
}

Anisotropy make_anisotropy(const Config& cfg, int dim) {
  std::string a = cfg.get_string("kernel", "anisotropy", "constant");
  if (a == "constant") return Anisotropy::constant(cfg.get_double("kernel", "value", 1.0));
  return Anisotropy::from_table_file(a, dim);
}

Kernel make_kernel(const Config& cfg) {
  int N = kernel_dim(cfg);
  return Kernel(N, kernel_s(cfg), make_anisotropy(cfg, N), cfg.get_bool("kernel", "normalized", true));
}

// members = "c11, c12; c21, c22": constant anisotropies of the inf-sup family.
KernelFamily make_family(const Config& cfg) {
  int N = kernel_dim(cfg);
  double s = kernel_s(cfg);
  bool normalized = cfg.get_bool("kernel", "normalized", true);
  std::string spec = cfg.get_string("family", "members", "");
  if (spec.empty()) throw ConfigError("family.members is required for this operator");
  std::vector<std::vector<Kernel>> rows;
  double lo = kInfinity, hi = 0.0;
  std::stringstream rs(spec);
  std::string row;
  while (std::getline(rs, row, ';')) {
    Config one = Config::parse_string("v = " + row, cfg.where("family", "members"));
    std::vector<Kernel> ks;
    for (double c : one.get_doubles("", "v", {})) {
      if (!(c > 0.0)) throw ConfigError(cfg.where("family", "members") + ": members must be positive");
      ks.emplace_back(N, s, Anisotropy::constant(c), normalized);
      lo = std::min(lo, ks.back().scale() * c);
      hi = std::max(hi, ks.back().scale() * c);
    }
    rows.push_back(std::move(ks));
  }
  EllipticityBounds b(cfg.get_double("family", "gamma", lo), cfg.get_double("family", "Gamma", hi));
  return KernelFamily(std::move(rows), b);
}

QuadratureConfig make_quadrature(const Config& cfg) {
  QuadratureConfig q;
  q.r_near = cfg.get_double("quadrature", "r_near", q.r_near);
  q.R_far = cfg.get_double("quadrature", "R_far", q.R_far);
  q.near_levels = cfg.get_int("quadrature", "near_levels", q.near_levels);
  q.sphere_order = cfg.get_int("quadrature", "sphere_order", q.sphere_order);
  q.radial_order = cfg.get_int("quadrature", "radial_order", q.radial_order);
  q.estimate_error = cfg.get_bool("quadrature", "estimate_error", q.estimate_error);
  std::string tail = cfg.get_string("quadrature", "tail", "auto");
  if (tail == "auto") q.tail_mode = TailMode::kAuto;
  else if (tail == "analytic") q.tail_mode = TailMode::kAnalyticZero;
  else if (tail == "growth") q.tail_mode = TailMode::kGrowthBound;
  else if (tail == "mapped") q.tail_mode = TailMode::kMapped;
  else throw ConfigError(cfg.where("quadrature", "tail") + ": expected auto, analytic, growth or mapped");
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[quadrature] ") + e.what());
  }
  return q;
}

SolveConfig make_solver_config(const Config& cfg) {
  SolveConfig c;
  c.delta = cfg.get_double("solver", "delta", c.delta);
  c.spacing = cfg.get_double("solver", "spacing", c.spacing);
  c.grading = cfg.get_double("solver", "grading", c.grading);
  c.core_fraction = cfg.get_double("solver", "core_fraction", c.core_fraction);
  c.near_factor = cfg.get_double("solver", "near_factor", c.near_factor);
  c.sphere_order = cfg.get_int("solver", "sphere_order", c.sphere_order);
  c.radial_order = cfg.get_int("solver", "radial_order", c.radial_order);
  c.layer_levels = cfg.get_int("solver", "layer_levels", c.layer_levels);
  c.linear_tolerance = cfg.get_double("solver", "tolerance", c.linear_tolerance);
  c.max_linear_iterations = cfg.get_int("solver", "max_iterations", c.max_linear_iterations);
  c.max_policy_iterations = cfg.get_int("solver", "max_policy_iterations", c.max_policy_iterations);
  c.relaxation = cfg.get_double("solver", "relaxation", c.relaxation);
  c.spacing_exponent = cfg.get_double("solver", "spacing_exponent", c.spacing_exponent);
  std::string m = cfg.get_string("solver", "method", "bicgstab");
  if (m == "bicgstab") c.method = LinearMethod::kBiCGSTAB;
  else if (m == "gauss-seidel") c.method = LinearMethod::kGaussSeidel;
  else throw ConfigError(cfg.where("solver", "method") + ": expected bicgstab or gauss-seidel");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[solver] ") + e.what());
  }
  return c;
}

// Boundary data: constant:C, xK (coordinate K, 1-based) or table:PATH with
// rows `param value` in the boundary parametrization (N = 2).
BoundaryFunction make_boundary_function(const std::string& spec, DomainPtr dom, const std::string& where) {
  if (spec.rfind("constant:", 0) == 0) {
    double c = 0.0;
    try {
      c = std::stod(spec.substr(9));
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad constant in '" + spec + "'");
    }
    return [c](const Vec&) { return c; };
  }
  if (spec.size() == 2 && spec[0] == 'x' && spec[1] >= '1' && spec[1] <= '3') {
    int k = spec[1] - '1';
    if (k >= dom->dim()) throw ConfigError(where + ": coordinate beyond the dimension");
    return [k](const Vec& x) { return x[k]; };
  }
  if (spec.rfind("table:", 0) == 0) {
    if (dom->dim() != 2) throw ConfigError(where + ": boundary tables need N = 2");
    std::ifstream in(spec.substr(6));
    if (!in) throw ConfigError(where + ": cannot read '" + spec.substr(6) + "'");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double t, v;
      if (!(ls >> t >> v)) throw ConfigError(where + ": bad table row '" + line + "'");
      rows.emplace_back(t, v);
    }
    if (rows.size() < 2) throw ConfigError(where + ": table needs at least two rows");
    std::sort(rows.begin(), rows.end());
    double period = dom->boundary_period();
    return [rows, period, dom](const Vec& x) {
      double t = dom->boundary_param(x);
      t -= period * std::floor((t - rows.front().first) / period);
      auto it = std::upper_bound(rows.begin(), rows.end(), std::make_pair(t, kInfinity));
      auto a = it == rows.begin() ? rows.back() : *(it - 1);
      auto b = it == rows.end() ? std::make_pair(rows.front().first + period, rows.front().second) : *it;
      if (it == rows.begin()) a.first -= period;
      double w = b.first > a.first ? (t - a.first) / (b.first - a.first) : 0.0;
      return a.second + w * (b.second - a.second);
    };
  }
  throw ConfigError(where + ": expected constant:C, x1..x3 or table:PATH, got '" + spec + "'");
}

ProblemData make_problem(const Config& cfg, DomainPtr dom, double s) {
  ProblemData d;
  d.h = make_boundary_function(cfg.get_string("data", "h", "constant:" + num(std::pow(2.0, s - 1.0))), dom,
                               cfg.where("data", "h"));
  auto field = [&](const char* key) -> FieldPtr {
    std::string spec = cfg.get_string("data", key, "none");
    if (spec == "none" || spec == "zero") return nullptr;
    try {
      return field_from_spec(spec, dom, s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(cfg.where("data", key) + ": " + e.what());
    }
  };
  d.f = field("f");
  d.g = field("g");
  return d;
}

BarrierConfig make_barrier_config(const Config& cfg, double s) {
  BarrierConfig b;
  b.tau = cfg.get_double("barriers", "tau", b.tau);
  b.beta = cfg.get_double("barriers", "beta", b.beta);
  b.delta0 = cfg.get_double("barriers", "delta0", b.delta0);
  b.anchors = cfg.get_int("barriers", "anchors", b.anchors);
  b.eta_levels = cfg.get_int("barriers", "eta_levels", b.eta_levels);
  b.cert_points = cfg.get_int("barriers", "cert_points", b.cert_points);
  b.margin = cfg.get_double("barriers", "margin", b.margin);
  b.layer_min = cfg.get_double("barriers", "layer_min", b.layer_min);
  b.layer_max = cfg.get_double("barriers", "layer_max", b.layer_max);
  b.max_doublings = cfg.get_int("barriers", "max_doublings", b.max_doublings);
  b.modulus_samples = cfg.get_int("barriers", "modulus_samples", b.modulus_samples);
  b.holder_alpha = cfg.get_double("barriers", "holder_alpha", b.holder_alpha);
  b.bounds = EllipticityBounds(cfg.get_double("barriers", "gamma", b.bounds.gamma),
                               cfg.get_double("barriers", "Gamma", b.bounds.Gamma));
  b.seed = static_cast<std::uint64_t>(cfg.get_int("", "seed", static_cast<int>(b.seed)));
  b.quad = make_quadrature(cfg);
  try {
    b.validate(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[barriers] ") + e.what());
  }
  return b;
}

std::vector<Vec> anchors_from(const Config& cfg, const Domain& dom, int fallback) {
  int n = cfg.get_int("analysis", "rays", fallback);
  if (n < 1) throw ConfigError(cfg.where("analysis", "rays") + ": need at least one ray");
  return dom.sample_boundary(n);
}

struct Solved {
  DomainPtr dom;
  double s = 0.5;
  ProblemData data;
  std::optional<DiscreteSolution> solution;
  SolveReport report;
  FieldPtr closed_form;
  double delta = 0.0;

  double operator()(const Vec& x) const { return solution ? (*solution)(x) : closed_form->value(x); }
};

// With analysis.field set (and allowed) the closed-form field stands in for a solve.
Solved run_solver(const Config& cfg, bool allow_field) {
  Solved out;
  int N = kernel_dim(cfg);
  out.s = kernel_s(cfg);
  out.dom = make_domain(cfg, N);
  std::string field = allow_field ? cfg.get_string("analysis", "field", "") : "";
  if (!field.empty()) {
    try {
      out.closed_form = field_from_spec(field, out.dom, out.s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(cfg.where("analysis", "field") + ": " + e.what());
    }
    out.data = make_problem(cfg, out.dom, out.s);
    return out;
  }
  SolveConfig sc = make_solver_config(cfg);
  out.delta = sc.delta;
  out.data = make_problem(cfg, out.dom, out.s);
  std::string op = cfg.get_string("solver", "operator", "linear");
  MeshPtr mesh;
  if (op == "linear") {
    out.solution.emplace(solve(make_kernel(cfg), out.dom, out.data, sc, &out.report));
    return out;
  }
  mesh = build_mesh(out.dom, sc);
  if (op == "isaacs") {
    auto ops = assemble_family(make_family(cfg), mesh, out.data, sc);
    out.report = solve_isaacs(ops, sc);
  } else if (op == "pucci-plus" || op == "pucci-minus") {
    EllipticityBounds b(cfg.get_double("solver", "gamma", 1.0), cfg.get_double("solver", "Gamma", 1.0));
    out.report = solve_pucci(b, op == "pucci-plus", out.s, mesh, out.data, sc);
  } else {
    throw ConfigError(cfg.where("solver", "operator") + ": expected linear, isaacs, pucci-plus or pucci-minus");
  }
  out.solution.emplace(mesh, out.report.u, out.s, out.data);
  return out;
}

json report_json(const SolveReport& r) {
  json j;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["max_residual"] = r.max_residual;
  j["residual_history"] = r.residual_history;
  j["policy_changes"] = r.policy_changes;
  j["policy_residuals"] = r.policy_residuals;
  return j;
}

}  // namespace

// ---------------------------------------------------------------- eval, c-constant

int cmd_eval(const CommonOptions& common, const EvalOptions& opt) {
  Config cfg = load_config(common);
  if (opt.s) cfg.set("kernel", "s", num(*opt.s));
  if (opt.dim) cfg.set("kernel", "N", std::to_string(*opt.dim));
  int N = kernel_dim(cfg);
  double s = kernel_s(cfg);
  DomainPtr dom = make_domain(cfg, N);
  if (opt.field.empty()) throw ConfigError("eval: --field is required");
  FieldPtr u;
  try {
    u = field_from_spec(opt.field, dom, s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--field: ") + e.what());
  }
  std::vector<Vec> points;
  for (const std::string& p : opt.points) points.push_back(parse_point(p, N));
  if (!opt.points_file.empty()) {
    std::ifstream in(opt.points_file);
    if (!in) throw ConfigError("cannot read points file '" + opt.points_file + "'");
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
      points.push_back(parse_point(line, N));
    }
  }
  if (points.empty()) throw ConfigError("eval: no points given (use --point or --points-file)");

  QuadratureConfig q = make_quadrature(cfg);
  std::function<EvalResult(const Vec&)> op;
  if (opt.op == "linear") {
    Kernel k = make_kernel(cfg);
    op = [k, u, q](const Vec& x) { return linear_op(k, *u, x, q); };
  } else if (opt.op == "frac-laplacian") {
    op = [u, s, q](const Vec& x) { return frac_laplacian(*u, x, s, q); };
  } else if (opt.op == "pucci-plus" || opt.op == "pucci-minus") {
    EllipticityBounds b(cfg.get_double("family", "gamma", 1.0), cfg.get_double("family", "Gamma", 1.0));
    bool plus = opt.op == "pucci-plus";
    op = [u, b, s, q, plus](const Vec& x) {
      return plus ? pucci_plus(*u, x, b, s, q) : pucci_minus(*u, x, b, s, q);
    };
  } else if (opt.op == "isaacs") {
    KernelFamily fam = make_family(cfg);
    op = [fam, u, q](const Vec& x) { return isaacs_op(fam, *u, x, q); };
  } else {
    throw ConfigError("--op: expected linear, frac-laplacian, pucci-plus, pucci-minus or isaacs");
  }

  std::ostringstream csv;
  for (int i = 0; i < N; ++i) csv << "x" << i + 1 << ",";
  csv << "value,error_estimate\n";
  for (const Vec& x : points) {
    EvalResult r = op(x);
    if (!std::isfinite(r.value)) throw NumericalFailure("eval: non-finite value at point " + vec_json(x).dump());
    for (int i = 0; i < N; ++i) csv << num(x[i]) << ",";
    csv << num(r.value) << "," << num(r.error_estimate) << "\n";
  }
  std::cout << csv.str();
  write_text(output_path(common, cfg, "eval.csv"), csv.str());
  return 0;
}

int cmd_c_constant(const CommonOptions& common, const CConstantOptions& opt) {
  Config cfg = load_config(common);
  if (opt.s) cfg.set("kernel", "s", num(*opt.s));
  if (opt.dim) cfg.set("kernel", "N", std::to_string(*opt.dim));
  Kernel k = make_kernel(cfg);
  QuadratureConfig q = make_quadrature(cfg);
  std::vector<double> taus = opt.taus;
  if (taus.empty()) {
    for (int i = 1; i < 10; ++i) taus.push_back(-1.0 + (1.0 + 2.0 * k.s()) * i / 10.0);
  }
  std::ostringstream csv;
  csv << "tau,value,error_estimate\n";
  for (double tau : taus) {
    if (!(tau > -1.0 && tau < 2.0 * k.s()))
      throw ConfigError("--tau " + num(tau) + " is outside (-1, 2s)");
    EvalResult r = c_constant(k, tau, q);
    csv << num(tau) << "," << num(r.value) << "," << num(r.error_estimate) << "\n";
  }
  std::cout << csv.str();
  write_text(output_path(common, cfg, "c_constant.csv"), csv.str());
  return 0;
}

// ---------------------------------------------------------------- solve

int cmd_solve(const CommonOptions& common) {
  Config cfg = load_config(common);
  Solved sol = run_solver(cfg, false);
  const Mesh& mesh = sol.solution->mesh();
  const Eigen::VectorXd& u = sol.solution->values();
  int N = mesh.domain().dim();

  std::ostringstream csv;
  for (int i = 0; i < N; ++i) csv << "x" << i + 1 << ",";
  csv << "d,u,renormalized\n";
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Vec& x = mesh.node(i);
    double d = mesh.node_distance(i);
    for (int k = 0; k < N; ++k) csv << num(x[k]) << ",";
    csv << num(d) << "," << num(u[static_cast<Eigen::Index>(i)]) << ","
        << num(std::pow(d, 1.0 - sol.s) * u[static_cast<Eigen::Index>(i)]) << "\n";
  }
  write_text(output_path(common, cfg, "solution.csv"), csv.str());

  json rep;
  rep["command"] = "solve";
  rep["domain"] = mesh.domain().name();
  rep["s"] = sol.s;
  rep["delta"] = mesh.delta();
  rep["spacing"] = mesh.spacing();
  rep["nodes"] = mesh.size();
  rep["rings"] = mesh.rings().size();
  rep["solver"] = report_json(sol.report);
  write_json(output_path(common, cfg, "report.json"), rep);

  // Profile along a few normal rays, for plotting.
  std::vector<Vec> anchors = anchors_from(cfg, mesh.domain(), 8);
  std::ostringstream prof;
  prof << "ray,d,u,renormalized\n";
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    Vec n = mesh.domain().inward_normal(anchors[a]);
    for (double d : mesh.rings()) {
      double v = (*sol.solution)(anchors[a] + d * n);
      prof << a << "," << num(d) << "," << num(v) << "," << num(std::pow(d, 1.0 - sol.s) * v) << "\n";
    }
  }
  write_text(output_path(common, cfg, "solution_profile.csv"), prof.str());

  if (!sol.report.converged) throw NumericalFailure("solver did not converge");
  return 0;
}

// ---------------------------------------------------------------- verify-barriers

int cmd_verify_barriers(const CommonOptions& common) {
  Config cfg = load_config(common);
  int N = kernel_dim(cfg);
  double s = kernel_s(cfg);
  DomainPtr dom = make_domain(cfg, N);
  BarrierConfig bc = make_barrier_config(cfg, s);
  BoundaryFunction h = make_problem(cfg, dom, s).h;

  BarrierSet set = build_barrier_set(dom, s, h, bc);
  std::vector<Vec> points = dom->sample_interior(bc.cert_points, bc.seed, bc.layer_min, bc.layer_max);
  BarrierCertification cert = certify_barriers(set, points, bc);

  auto report = [](const CertificationReport& r) {
    json j;
    j["label"] = r.label;
    j["passed"] = r.passed;
    j["failures"] = r.failures;
    j["worst_slack"] = r.worst_slack;
    j["worst_index"] = r.worst_index;
    j["coefficient"] = r.coefficient;
    j["attempts"] = r.attempts;
    json pts = json::array();
    for (const CertificationPoint& p : r.points) {
      json e;
      e["x"] = vec_json(p.x);
      e["value"] = p.value;
      e["error"] = p.error;
      e["required"] = p.required;
      e["slack"] = p.slack;
      e["pass"] = p.pass;
      pts.push_back(e);
    }
    j["points"] = pts;
    return j;
  };
  json out;
  out["command"] = "verify-barriers";
  out["domain"] = dom->name();
  out["s"] = s;
  out["tau"] = bc.tau;
  out["bounds"] = {bc.bounds.gamma, bc.bounds.Gamma};
  out["margin"] = bc.margin;
  out["passed"] = cert.passed;
  out["C2"] = cert.C2;
  out["doublings"] = cert.doublings;
  out["w1"] = {{"coefficient", set.w1.coefficient}, {"exponent", set.w1.exponent}, {"passed", set.w1.report.passed}};
  out["w2"] = {{"coefficient", set.w2.coefficient}, {"exponent", set.w2.exponent}, {"passed", set.w2.report.passed}};
  out["modulus"] = {{"knots", set.data.modulus.knots()}, {"values", set.data.modulus.knot_values()}};
  out["etas"] = set.etas;
  out["upper"] = report(cert.upper);
  out["lower"] = report(cert.lower);
  write_json(output_path(common, cfg, "barriers.json"), out);

  BarrierEnvelope V = set.envelope(BarrierType::kUpper), U = set.envelope(BarrierType::kLower);
  std::vector<Vec> anchors = anchors_from(cfg, *dom, 8);
  std::ostringstream csv;
  csv << "ray,d,h,renormalized_V,renormalized_U\n";
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    Vec n = dom->inward_normal(anchors[a]);
    double h0 = h(anchors[a]);
    for (int k = 0; k <= 40; ++k) {
      double d = bc.layer_max * std::pow(1e-3, k / 40.0);
      double w = std::pow(d, 1.0 - s);
      Vec x = anchors[a] + d * n;
      csv << a << "," << num(d) << "," << num(h0) << "," << num(w * envelope_eval(V, x)) << ","
          << num(w * envelope_eval(U, x)) << "\n";
    }
  }
  write_text(output_path(common, cfg, "barrier_profile.csv"), csv.str());

  if (!cert.passed) throw NumericalFailure("barrier certification failed after " + std::to_string(cert.doublings) +
                                           " doublings of C2");
  return 0;
}

// ---------------------------------------------------------------- profile, rates

int cmd_profile(const CommonOptions& common) {
  Config cfg = load_config(common);
  Solved sol = run_solver(cfg, true);
  std::vector<double> distances = cfg.get_doubles("analysis", "distances", {0.4, 0.2, 0.1, 0.05, 0.025});
  std::vector<Vec> anchors = anchors_from(cfg, *sol.dom, 16);
  ProfileReport rep = boundary_profile([&sol](const Vec& x) { return sol(x); }, *sol.dom, sol.s, sol.data.h, anchors,
                                       distances, sol.delta);
  if (rep.rays.empty() || rep.rays.front().distances.empty())
    throw NumericalFailure("profile: no distances outside the layer");
  int N = sol.dom->dim();

  json out;
  out["command"] = "profile";
  out["domain"] = sol.dom->name();
  out["s"] = sol.s;
  out["source"] = sol.solution ? "solver" : sol.closed_form->name();
  out["smallest_distance"] = rep.smallest_distance;
  out["max_error_at_smallest"] = rep.max_error_at_smallest;
  out["max_relative_error_at_smallest"] = rep.max_relative_error_at_smallest;
  out["fitted_exponent"] = rep.fitted_exponent;
  out["warnings"] = rep.warnings;
  if (sol.solution) out["solver"] = report_json(sol.report);
  write_json(output_path(common, cfg, "profile.json"), out);

  std::ostringstream csv;
  csv << "ray,";
  for (int i = 0; i < N; ++i) csv << "x0_" << i + 1 << ",";
  csv << "d,h,renormalized,error\n";
  for (std::size_t r = 0; r < rep.rays.size(); ++r) {
    const ProfileRay& ray = rep.rays[r];
    for (std::size_t k = 0; k < ray.distances.size(); ++k) {
      csv << r << ",";
      for (int i = 0; i < N; ++i) csv << num(ray.x0[i]) << ",";
      csv << num(ray.distances[k]) << "," << num(ray.h0) << "," << num(ray.renormalized[k]) << ","
          << num(ray.errors[k]) << "\n";
    }
  }
  write_text(output_path(common, cfg, "profile.csv"), csv.str());
  return 0;
}

int cmd_rates(const CommonOptions& common) {
  Config cfg = load_config(common);
  Solved sol = run_solver(cfg, true);
  double lo = cfg.get_double("analysis", "band_min", 0.05), hi = cfg.get_double("analysis", "band_max", 0.3);
  if (!(lo > 0.0 && hi > lo)) throw ConfigError("analysis.band_min/band_max: need 0 < band_min < band_max");
  int samples = cfg.get_int("analysis", "samples", 12);
  std::vector<Vec> anchors = anchors_from(cfg, *sol.dom, 8);
  std::function<double(const Vec&)> step;
  if (sol.solution) step = [&sol](const Vec& x) { return sol.solution->difference_step(x); };
  RateReport rep = gradient_rate([&sol](const Vec& x) { return sol(x); }, *sol.dom, lo, hi, anchors, samples, step);

  json out;
  out["command"] = "rates";
  out["domain"] = sol.dom->name();
  out["s"] = sol.s;
  out["source"] = sol.solution ? "solver" : sol.closed_form->name();
  out["band"] = {lo, hi};
  out["slope"] = rep.slope;
  out["intercept"] = rep.intercept;
  out["slope_stderr"] = rep.slope_stderr;
  out["slope_band"] = {rep.band_lo, rep.band_hi};
  out["reference_slope"] = sol.s - 2.0;
  out["decades"] = rep.decades;
  out["spans_required_decades"] = rep.spans_required_decades;
  out["samples"] = rep.d.size();
  write_json(output_path(common, cfg, "rates.json"), out);

  std::ostringstream csv;
  csv << "d,grad_norm\n";
  for (std::size_t i = 0; i < rep.d.size(); ++i) csv << num(rep.d[i]) << "," << num(rep.grad[i]) << "\n";
  write_text(output_path(common, cfg, "rates.csv"), csv.str());
  return 0;
}

// ---------------------------------------------------------------- limit

int cmd_limit(const CommonOptions& common) {
  Config cfg = load_config(common);
  int N = kernel_dim(cfg);
  std::vector<double> s_values = cfg.get_doubles("analysis", "s_values", {0.9, 0.95, 0.99});
  for (double s : s_values)
    if (!(s > 0.0 && s < 1.0)) throw ConfigError("analysis.s_values: every s must lie in (0, 1)");
  LimitCoefficients lc = limit_coefficients(make_anisotropy(cfg, N), N, s_values);

  // Finite-difference oracle: the Laplacian of the windowed quadratic x_k^2 at 0 is 2.
  std::vector<double> fd;
  for (int k = 0; k < N; ++k) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
    Q(k, k) = 1.0;
    FieldPtr wq = windowed_quadratic_field(Vec::Zero(N), Q, 1.0);
    fd.push_back(fd_laplacian([&wq](const Vec& y) { return wq->value(y); }, Vec::Zero(N), 1e-3) / 2.0);
  }

  json out;
  out["command"] = "limit";
  out["N"] = N;
  out["s_values"] = lc.s_values;
  out["A"] = lc.A;
  out["limit"] = lc.limit;
  out["operator_coefficient"] = lc.operator_coefficient;
  out["fd_coefficient"] = fd;
  std::vector<double> rel;
  for (int k = 0; k < N; ++k) rel.push_back(std::abs(lc.operator_coefficient[k] - fd[k]) / std::abs(fd[k]));
  out["relative_error"] = rel;
  write_json(output_path(common, cfg, "limit.json"), out);

  std::ostringstream csv;
  csv << "s";
  for (int k = 0; k < N; ++k) csv << ",A" << k + 1;
  csv << "\n";
  for (std::size_t m = 0; m < lc.s_values.size(); ++m) {
    csv << num(lc.s_values[m]);
    for (int k = 0; k < N; ++k) csv << "," << num(lc.A[m][k]);
    csv << "\n";
  }
  csv << "1";
  for (int k = 0; k < N; ++k) csv << "," << num(lc.limit[k]);
  csv << "\n";
  write_text(output_path(common, cfg, "limit.csv"), csv.str());
  return 0;
}

// ---------------------------------------------------------------- check-lemma, check-halfspace

int cmd_check_lemma(const CommonOptions& common) {
  Config cfg = load_config(common);
  int N = kernel_dim(cfg);
  Kernel k = make_kernel(cfg);
  DomainPtr dom = make_domain(cfg, N);
  QuadratureConfig q = make_quadrature(cfg);
  double tau = cfg.get_double("analysis", "tau", 0.3), alpha = cfg.get_double("analysis", "alpha", 0.4);
  if (!(tau > -1.0 && tau < 2.0 * k.s())) throw ConfigError("analysis.tau must lie in (-1, 2s)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("analysis.alpha must lie in (0, 1]");
  double period = dom->boundary_period();
  Vec x0 = cfg.has("analysis", "x0") ? dom->project(vec_from(cfg.get_doubles("analysis", "x0", {}), N, "analysis.x0"))
                                     : dom->boundary_point(0.0);
  Vec z = cfg.has("analysis", "z") ? dom->project(vec_from(cfg.get_doubles("analysis", "z", {}), N, "analysis.z"))
                                   : dom->boundary_point(0.25 * period);
  std::vector<double> rho = cfg.get_doubles("analysis", "rho", {0.08, 0.04, 0.02, 0.01, 0.005, 0.0025});
  ProductFormulaReport rep = product_formula_check(k, dom, tau, alpha, x0, z, rho, q);

  json out;
  out["command"] = "check-lemma";
  out["domain"] = dom->name();
  out["s"] = k.s();
  out["tau"] = tau;
  out["alpha"] = alpha;
  out["x0"] = vec_json(rep.x0);
  out["z"] = vec_json(rep.z);
  out["c_expected"] = rep.c_expected;
  out["limit"] = rep.limit;
  out["relative_error"] = std::abs(rep.limit - rep.c_expected) / std::max(std::abs(rep.c_expected), 1e-300);
  out["residual_slope"] = rep.residual_slope;
  out["exponents"] = rep.exponents;
  write_json(output_path(common, cfg, "lemma.json"), out);

  std::ostringstream csv;
  csv << "rho,value,error_estimate,ratio\n";
  for (std::size_t i = 0; i < rep.rho.size(); ++i)
    csv << num(rep.rho[i]) << "," << num(rep.values[i]) << "," << num(rep.errors[i]) << "," << num(rep.ratios[i])
        << "\n";
  write_text(output_path(common, cfg, "lemma.csv"), csv.str());
  return 0;
}

int cmd_check_halfspace(const CommonOptions& common) {
  Config cfg = load_config(common);
  int N = kernel_dim(cfg);
  if (N < 2) throw ConfigError("check-halfspace needs N >= 2");
  double s = kernel_s(cfg);
  QuadratureConfig q = make_quadrature(cfg);
  std::vector<double> pd(N - 1, 0.0);
  pd[0] = 1.0;
  Vec p = vec_from(cfg.get_doubles("analysis", "p", pd), N - 1, "analysis.p");
  if (p.norm() == 0.0) throw ConfigError("analysis.p must be nonzero");
  HalfspaceReport rep = halfspace_checks(p, s, q);

  json out;
  out["command"] = "check-halfspace";
  out["N"] = N;
  out["s"] = s;
  out["p"] = vec_json(p);
  out["all_within"] = rep.all_within;
  out["all_decay"] = rep.all_decay;
  out["all_agree"] = rep.all_agree;
  out["gradient_point"] = vec_json(rep.gradient_point);
  out["gradient_fd"] = vec_json(rep.gradient_fd);
  out["gradient_exact"] = vec_json(rep.gradient_exact);
  write_json(output_path(common, cfg, "halfspace.json"), out);

  std::ostringstream csv;
  for (int i = 0; i < N; ++i) csv << "x" << i + 1 << ",";
  csv << "value,error_estimate,refined_value,refined_error,decay,decomposition,decomposition_error\n";
  for (const HalfspaceRow& r : rep.rows) {
    for (int i = 0; i < N; ++i) csv << num(r.x[i]) << ",";
    csv << num(r.direct.value) << "," << num(r.direct.error_estimate) << "," << num(r.refined.value) << ","
        << num(r.refined.error_estimate) << "," << num(r.decay) << "," << num(r.decomposition.value) << ","
        << num(r.decomposition.error_estimate) << "\n";
  }
  write_text(output_path(common, cfg, "halfspace.csv"), csv.str());
  return 0;
}

// ---------------------------------------------------------------- exit codes

int guarded(const std::string& out_dir, const std::string& command, const std::function<int()>& body) {
  auto failure = [&](const char* kind, const std::string& what) {
    json j;
    j["command"] = command;
    j["status"] = kind;
    j["message"] = what;
    try {
      std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
      std::ofstream(std::filesystem::path(out_dir.empty() ? "." : out_dir) / "failure.json") << j.dump(2) << "\n";
    } catch (const std::exception&) {
    }
  };
  try {
    return body();
  } catch (const NumericalFailure& e) {
    std::cerr << "fracblow " << command << ": numerical failure: " << e.what() << "\n";
    failure("numerical_failure", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "fracblow " << command << ": " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "fracblow " << command << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "fracblow " << command << ": numerical failure: " << e.what() << "\n";
    failure("numerical_failure", e.what());
    return 2;
  }
}

}  // namespace fracblow::cli
