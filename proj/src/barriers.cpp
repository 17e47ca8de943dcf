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


#include "fracblow/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fracblow/parallel.hpp"

namespace fracblow {

namespace {

double sign_of(BarrierType t) { return t == BarrierType::kUpper ? 1.0 : -1.0; }

std::string point_string(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

// Fine and coarse samples on rules fixed by the domain, so that samples of
// different fields at the same point can be combined.
SamplePair sample_on_domain_rules(const ScalarField& u, const Domain& dom, const Vec& x, double s,
                                  const QuadratureConfig& cfg) {
  std::optional<Vec> axis = boundary_axis_near(dom, x);
  SamplePair out;
  DirectionRule fine = half_sphere_rule(dom.dim(), cfg.sphere_order, axis);
  out.fine = sample_directions(u, x, s, cfg, &fine);
  if (cfg.estimate_error) {
    QuadratureConfig c = cfg.coarse();
    DirectionRule coarse = half_sphere_rule(dom.dim(), c.sphere_order, axis);
    out.coarse = sample_directions(u, x, s, c, &coarse);
  }
  return out;
}

double quintic_step(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

CertificationPoint judge(const Vec& x, const EvalResult& r, double required, bool super) {
  CertificationPoint p;
  p.x = x;
  p.value = r.value;
  p.error = r.error_estimate;
  p.required = required;
  p.slack = super ? -required - (r.value + r.error_estimate) : (r.value - r.error_estimate) - required;
  p.pass = p.slack >= 0.0;
  return p;
}

}  // namespace

// ---------------------------------------------------------------- Modulus

Modulus Modulus::from_pairs(const std::vector<std::pair<double, double>>& pairs, double diameter,
                            double inflation) {
  if (!(diameter > 0.0)) throw std::invalid_argument("modulus: diameter must be positive");
  if (!(inflation >= 1.0)) throw std::invalid_argument("modulus: inflation must be >= 1");
  std::vector<std::pair<double, double>> pts;
  for (auto [t, v] : pairs)
    if (t > 0.0 && std::isfinite(v)) pts.emplace_back(std::min(t, diameter), std::abs(v));
  std::sort(pts.begin(), pts.end());
  Modulus m;
  m.diameter_ = diameter;
  double running = 0.0;
  std::vector<std::pair<double, double>> hull{{0.0, 0.0}};
  auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  for (auto [t, v] : pts) {
    running = std::max(running, v);
    std::pair<double, double> p{t, running};
    if (p.first == hull.back().first) {
      p.second = std::max(p.second, hull.back().second);
      hull.pop_back();
    }
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) hull.pop_back();
    hull.push_back(p);
  }
  if (running == 0.0) return m;
  m.t_.clear();
  m.m_.clear();
  for (auto [t, v] : hull) {
    m.t_.push_back(t);
    m.m_.push_back(inflation * v);
  }
  if (m.t_.back() < diameter) {
    m.t_.push_back(diameter);
    m.m_.push_back(m.m_.back());
  }
  return m;
}

Modulus Modulus::lipschitz(double L, double diameter) {
  if (!(L >= 0.0) || !(diameter > 0.0)) throw std::invalid_argument("modulus: bad Lipschitz data");
  Modulus m;
  m.diameter_ = diameter;
  m.t_ = {0.0, diameter};
  m.m_ = {0.0, L * diameter};
  return m;
}

double Modulus::operator()(double t) const {
  if (!(t > 0.0)) return 0.0;
  if (t >= t_.back()) return m_.back();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - t_.begin());
  double a = (t - t_[k - 1]) / (t_[k] - t_[k - 1]);
  return m_[k - 1] + a * (m_[k] - m_[k - 1]);
}

bool Modulus::is_zero() const {
  return std::all_of(m_.begin(), m_.end(), [](double v) { return v == 0.0; });
}

double Modulus::worst_doubling_gap(int n) const {
  double D = diameter_ > 0.0 ? diameter_ : 1.0;
  double worst = -kInfinity;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      double t = D * i / n, eta = D * j / n;
      worst = std::max(worst, (*this)(t) - (*this)(eta) * (1.0 + t / eta));
    }
  return worst;
}

double profile_modulus(const Modulus& m, double C2, double t, const std::vector<double>& etas, double alpha) {
  if (etas.empty()) throw std::invalid_argument("profile_modulus: empty eta grid");
  double best = kInfinity;
  for (double eta : etas) {
    double me = m(eta);
    best = std::min(best, me + 2.0 * (1.0 + C2) * (me / eta) * std::pow(t, alpha));
  }
  return best;
}

BoundaryExtension extend_boundary_data(DomainPtr dom, BoundaryFunction h, int samples, double inflation) {
  if (samples < 2) throw std::invalid_argument("extend_boundary_data: need at least two samples");
  std::vector<Vec> pts = dom->sample_boundary(samples);
  std::vector<double> vals;
  double mean = 0.0;
  for (const Vec& p : pts) {
    vals.push_back(h(p));
    mean += vals.back();
  }
  mean /= static_cast<double>(pts.size());
  double hmax = 0.0;
  for (double v : vals) hmax = std::max(hmax, std::abs(v));
  // A small Lipschitz floor keeps the modulus positive for constant data.
  const double floor_slope = 1e-3 * std::max(hmax, 1.0) / dom->diameter();
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double t = (pts[i] - pts[j]).norm();
      pairs.emplace_back(t, std::max(std::abs(vals[i] - vals[j]), floor_slope * t));
    }
  BoundaryExtension out;
  out.modulus = Modulus::from_pairs(pairs, dom->diameter(), inflation);
  out.h = h;
  out.ext = [dom, h, mean](const Vec& x) {
    try {
      return h(dom->project(x));
    } catch (const NonUniqueProjection&) {
      return mean;
    }
  };
  return out;
}

// ---------------------------------------------------------------- certification

EvalResult OperatorSpec::reduce(const SamplePair& samples, bool super) const {
  if (family) {
    const KernelFamily& fam = *family;
    return fracblow::reduce(samples, [&](const DirectionalSamples& d) { return reduce_isaacs(fam, d); },
                            fam.bounds().Gamma);
  }
  return fracblow::reduce(samples, [&](const DirectionalSamples& d) { return reduce_pucci(bounds, d, super); },
                          bounds.Gamma);
}

void CertificationReport::finalize() {
  failures = 0;
  worst_slack = kInfinity;
  worst_index = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const CertificationPoint& p = points[i];
    if (!p.pass) ++failures;
    if (p.slack < worst_slack) {
      worst_slack = p.slack;
      worst_index = i;
    }
  }
  if (points.empty()) worst_slack = 0.0;
  passed = failures == 0;
}

CertificationReport verify_supersolution(const ScalarField& field, const OperatorSpec& op,
                                         const std::vector<Vec>& points,
                                         const std::function<double(const Vec&)>& margin_fn,
                                         const QuadratureConfig& cfg, bool supersolution) {
  CertificationReport rep;
  rep.label = supersolution ? "supersolution" : "subsolution";
  rep.points.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    SamplePair sp = sample_pair(field, points[i], op.s, cfg);
    rep.points[i] = judge(points[i], op.reduce(sp, supersolution), margin_fn ? margin_fn(points[i]) : 0.0,
                          supersolution);
  });
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------- w1, w2

void BarrierConfig::validate(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("barriers: s must lie in (0, 1)");
  if (!(tau > 0.0 && tau < s)) throw std::invalid_argument("barriers: tau must lie in (0, s)");
  if (!(beta > 0.0 && beta < s)) throw std::invalid_argument("barriers: beta must lie in (0, s)");
  if (anchors < 1 || eta_levels < 1) throw std::invalid_argument("barriers: empty anchor or eta grid");
  if (cert_points < 1) throw std::invalid_argument("barriers: need certification points");
  if (!(margin >= 0.0)) throw std::invalid_argument("barriers: margin must be >= 0");
  if (!(layer_min > 0.0 && layer_max > layer_min)) throw std::invalid_argument("barriers: bad layer band");
  if (delta0 < 0.0) throw std::invalid_argument("barriers: delta0 must be >= 0");
  quad.validate();
}

CertifiedField build_w1(DomainPtr dom, double s, double beta, const BarrierConfig& cfg) {
  BarrierConfig c = cfg;
  c.beta = beta;
  c.validate(s);
  const OperatorSpec op{s, cfg.bounds, std::nullopt};
  std::vector<Vec> pts = dom->sample_interior(cfg.cert_points, cfg.seed, cfg.layer_min, 0.9 * dom->inradius());
  CertifiedField out;
  std::string last_failure;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    double b = beta / std::pow(2.0, attempt);
    FieldPtr unit = dist_pow_field(dom, b);
    std::vector<EvalResult> vals(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
      vals[i] = op.reduce(sample_on_domain_rules(*unit, *dom, pts[i], s, cfg.quad), true);
    });
    std::size_t worst = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (vals[i].value + vals[i].error_estimate > vals[worst].value + vals[worst].error_estimate) worst = i;
    double top = vals[worst].value + vals[worst].error_estimate;
    if (!(top < 0.0)) {
      last_failure = "beta " + std::to_string(b) + ": pucci_plus(d^beta) = " + std::to_string(top) + " at " +
                     point_string(pts[worst]);
      continue;
    }
    double A = (1.0 + cfg.margin) / -top;
    out.coefficient = A;
    out.exponent = b;
    out.field = dist_function_field(dom, [A, b](double d) { return A * std::pow(d, b); }, "w1");
    out.report.label = "w1";
    out.report.coefficient = A;
    out.report.attempts = attempt + 1;
    for (std::size_t i = 0; i < pts.size(); ++i)
      out.report.points.push_back(judge(pts[i], {A * vals[i].value, A * vals[i].error_estimate}, 1.0, true));
    out.report.finalize();
    return out;
  }
  throw NumericalFailure("w1 certification failed; worst case " + last_failure);
}

CertifiedField build_w2(DomainPtr dom, double s, double tau, const CertifiedField& w1, const BarrierConfig& cfg) {
  BarrierConfig c = cfg;
  c.tau = tau;
  c.validate(s);
  if (!w1.field) throw std::invalid_argument("build_w2: w1 missing");
  const double d0 = cfg.delta0 > 0.0 ? cfg.delta0 : dom->inradius() / 4.0;
  const double cap = std::pow(d0, tau);
  auto phi = [tau, d0, cap](double d) {
    if (d >= d0) return cap;
    double p = std::pow(d, tau);
    return p + quintic_step((d - 0.5 * d0) / (0.5 * d0)) * (cap - p);
  };
  FieldPtr blend = dist_function_field(dom, phi, "w2-blend");
  const OperatorSpec op{s, cfg.bounds, std::nullopt};

  std::vector<Vec> pts = dom->sample_interior(cfg.cert_points, cfg.seed + 1, cfg.layer_min, 0.5 * d0);
  const std::size_t n_layer = pts.size();
  for (const Vec& p : dom->sample_interior(cfg.cert_points / 2, cfg.seed + 2, 0.5 * d0, 0.9 * dom->inradius()))
    pts.push_back(p);
  std::vector<SamplePair> sb(pts.size()), sw(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    sb[i] = sample_on_domain_rules(*blend, *dom, pts[i], s, cfg.quad);
    sw[i] = sample_on_domain_rules(*w1.field, *dom, pts[i], s, cfg.quad);
  });

  std::string last_failure;
  double kappa = 1.0;
  for (int attempt = 0; attempt <= cfg.max_doublings; ++attempt, kappa *= 2.0) {
    std::vector<EvalResult> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = op.reduce(combine(1.0, sb[i], kappa, sw[i]), true);
    // The scale S must make S (value + error) <= -(1 + margin) d^{tau - 2s} on the layer.
    double S = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i) {
      double top = vals[i].value + vals[i].error_estimate;
      if (!(top < 0.0)) {
        ok = false;
        last_failure = "kappa " + std::to_string(kappa) + ": pucci_plus = " + std::to_string(top) + " at " +
                       point_string(pts[i]);
      } else if (i < n_layer) {
        double target = (1.0 + cfg.margin) * std::pow(dom->distance(pts[i]), tau - 2.0 * s);
        S = std::max(S, target / -top);
      }
    }
    if (!ok) continue;
    CertifiedField out;
    out.coefficient = S;
    out.exponent = tau;
    out.field = linear_combination(S, blend, S * kappa, w1.field);
    out.report.label = "w2";
    out.report.coefficient = S;
    out.report.attempts = attempt + 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double req = i < n_layer ? (1.0 + cfg.margin) * std::pow(dom->distance(pts[i]), tau - 2.0 * s) : 0.0;
      out.report.points.push_back(judge(pts[i], {S * vals[i].value, S * vals[i].error_estimate}, req, true));
    }
    out.report.finalize();
    return out;
  }
  throw NumericalFailure("w2 certification failed; worst case " + last_failure);
}

// ---------------------------------------------------------------- barriers

double BarrierFunction::operator()(const Vec& x) const {
  double d = dom->distance(x);
  if (!(d > 0.0)) return 0.0;
  double sg = sign_of(type);
  return (base() + sg * slope() * (x - y).norm()) * std::pow(d, s - 1.0) + sg * C2_eta * w2->value(x);
}

FieldPtr BarrierFunction::profile_field() const {
  FieldPtr prof = dist_pow_field(dom, s - 1.0);
  return linear_combination(base(), prof, sign_of(type) * slope(), product_field(radial_power_field(y, 1.0), prof));
}

FieldPtr BarrierFunction::field() const {
  return linear_combination(1.0, profile_field(), sign_of(type) * C2_eta, w2);
}

BarrierFunction make_barrier(DomainPtr dom, double s, const Vec& y, double eta, double h_y, const Modulus& m,
                             FieldPtr w2, double C2, BarrierType type) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("make_barrier: eta must lie in (0, 1)");
  if (!(C2 >= 0.0)) throw std::invalid_argument("make_barrier: C2 must be >= 0");
  if (dom->boundary_gap(y) > 1e-8) throw std::invalid_argument("make_barrier: anchor is not on the boundary");
  if (!w2) throw std::invalid_argument("make_barrier: w2 missing");
  BarrierFunction b;
  b.dom = std::move(dom);
  b.s = s;
  b.y = y;
  b.eta = eta;
  b.h_y = h_y;
  b.m_eta = m(eta);
  b.C2_eta = C2 * b.m_eta / eta;
  b.w2 = std::move(w2);
  b.type = type;
  return b;
}

std::size_t BarrierEnvelope::active(const Vec& x) const {
  if (members.empty()) throw std::invalid_argument("envelope: empty anchor grid");
  std::size_t best = 0;
  double bv = members[0](x);
  for (std::size_t k = 1; k < members.size(); ++k) {
    double v = members[k](x);
    if (mode == BarrierType::kUpper ? v < bv : v > bv) {
      bv = v;
      best = k;
    }
  }
  return best;
}

double envelope_eval(const BarrierEnvelope& env, const Vec& x) { return env.members[env.active(x)](x); }

BarrierEnvelope BarrierSet::envelope(BarrierType type) const {
  BarrierEnvelope env;
  env.mode = type;
  for (const Vec& y : anchors) {
    double hy = data.h(y);
    for (double eta : etas) env.members.push_back(make_barrier(dom, s, y, eta, hy, data.modulus, w2.field, C2, type));
  }
  return env;
}

BarrierSet build_barrier_set(DomainPtr dom, double s, BoundaryFunction h, const BarrierConfig& cfg) {
  cfg.validate(s);
  BarrierSet set;
  set.dom = dom;
  set.s = s;
  set.data = extend_boundary_data(dom, std::move(h), cfg.modulus_samples, 1.1);
  set.w1 = build_w1(dom, s, cfg.beta, cfg);
  set.w2 = build_w2(dom, s, cfg.tau, set.w1, cfg);
  set.anchors = dom->sample_boundary(cfg.anchors);
  for (int k = 1; k <= cfg.eta_levels; ++k) set.etas.push_back(std::pow(2.0, -k));
  return set;
}

BarrierCertification certify_barriers(BarrierSet& set, const std::vector<Vec>& points, const BarrierConfig& cfg) {
  cfg.validate(set.s);
  const double s = set.s;
  const OperatorSpec op{s, cfg.bounds, std::nullopt};
  const Domain& dom = *set.dom;
  FieldPtr prof = dist_pow_field(set.dom, s - 1.0);

  // Samples of the pieces shared by all members, and per-anchor samples of
  // |x - y| d^{s-1}, filled on demand.
  struct PointCache {
    SamplePair prof, w2;
    std::map<std::size_t, SamplePair> radial;
  };
  std::vector<PointCache> cache(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    cache[i].prof = sample_on_domain_rules(*prof, dom, points[i], s, cfg.quad);
    cache[i].w2 = sample_on_domain_rules(*set.w2.field, dom, points[i], s, cfg.quad);
  });

  auto check = [&](const BarrierEnvelope& env, bool super, CertificationReport& rep) {
    rep.points.assign(points.size(), {});
    parallel_for(points.size(), [&](std::size_t i) {
      const Vec& x = points[i];
      std::size_t k = env.active(x);
      const BarrierFunction& b = env.members[k];
      std::size_t anchor = k / set.etas.size();
      auto it = cache[i].radial.find(anchor);
      if (it == cache[i].radial.end()) {
        FieldPtr rad = product_field(radial_power_field(b.y, 1.0), prof);
        it = cache[i].radial.emplace(anchor, sample_on_domain_rules(*rad, dom, x, s, cfg.quad)).first;
      }
      double sg = sign_of(b.type);
      SamplePair pair = combine(b.base(), cache[i].prof, sg * b.slope(), it->second);
      pair = combine(1.0, pair, sg * b.C2_eta, cache[i].w2);
      double req = (1.0 + cfg.margin) * 0.5 * b.C2_eta * std::pow(dom.distance(x), cfg.tau - 2.0 * s);
      rep.points[i] = judge(x, op.reduce(pair, super), req, super);
    });
    rep.finalize();
  };

  BarrierCertification out;
  for (int k = 0; k <= cfg.max_doublings; ++k) {
    out.upper = CertificationReport{};
    out.lower = CertificationReport{};
    out.upper.label = "V";
    out.lower.label = "U";
    check(set.envelope(BarrierType::kUpper), true, out.upper);
    check(set.envelope(BarrierType::kLower), false, out.lower);
    out.upper.coefficient = out.lower.coefficient = set.C2;
    out.upper.attempts = out.lower.attempts = k + 1;
    out.C2 = set.C2;
    out.doublings = k;
    out.passed = out.upper.passed && out.lower.passed;
    if (out.passed) break;
    if (k < cfg.max_doublings) set.C2 *= 2.0;
  }
  return out;
}

}  // namespace fracblow
