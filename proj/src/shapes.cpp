// Copyright 2026 The radialab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "radialab/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <Eigen/Dense>

#include "radialab/expression.hpp"

namespace radialab {

namespace {

constexpr double kLambdaStep = 1e-6;  // relative step for Lambda'
constexpr double kLStep = 1e-4;       // relative step for L'
// Floor on log(u + a) so negative alpha stays finite where u + a -> 1.
constexpr double kLogFloor = 1e-12;

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double central_difference(const ScalarFn& f, double u, double rel_step) {
  const double h = (u > 0.0 ? u : 1.0) * rel_step;
  return (f(u + h) - f(u - h)) / (2.0 * h);
}

struct LogPolyTerms {
  LogPolyParams p;

  double log_term(double u) const {
    return std::max(std::log1p(u + (p.a - 1.0)), kLogFloor);
  }

  double lambda(double u) const {
    return p.c * std::pow(log_term(u), p.alpha) * std::pow(u + p.b, p.beta);
  }

  double lambda_prime(double u) const {
    const double l = log_term(u);
    const double ub = u + p.b;
    const double ua = u + p.a;
    double out = p.beta * std::pow(l, p.alpha) * std::pow(ub, p.beta - 1.0);
    if (p.alpha != 0.0) out += p.alpha * std::pow(l, p.alpha - 1.0) * std::pow(ub, p.beta) / ua;
    return p.c * out;
  }

  double lambda_second(double u) const {
    const double l = log_term(u);
    const double ub = u + p.b;
    const double ua = u + p.a;
    const double P0 = std::pow(ub, p.beta);
    const double P1 = std::pow(ub, p.beta - 1.0);
    const double P2 = std::pow(ub, p.beta - 2.0);
    double out = p.beta * (p.beta - 1.0) * std::pow(l, p.alpha) * P2;
    if (p.alpha != 0.0) {
      const double la1 = std::pow(l, p.alpha - 1.0);
      out += p.alpha * (p.alpha - 1.0) * std::pow(l, p.alpha - 2.0) * P0 / (ua * ua) +
             2.0 * p.alpha * p.beta * la1 * P1 / ua - p.alpha * la1 * P0 / (ua * ua);
    }
    return p.c * out;
  }

  double big_L_prime(double u) const { return lambda_prime(u) + u * lambda_second(u); }
};

}  // namespace

// ---------------------------------------------------------------------------
// ShapeSpec

ShapeSpec ShapeSpec::compact(std::string id, Compact parts) {
  if (!parts.log_psi) throw ConfigError("compact shape '" + id + "' needs log_psi");
  if (!(parts.u_star > 0.0) || !std::isfinite(parts.u_star)) {
    throw ConfigError("compact shape '" + id + "': u_star must be positive and finite");
  }
  if (parts.tail && (!(parts.tail->a > 0.0) || !(parts.tail->b > -1.0))) {
    throw ConfigError("compact shape '" + id + "': tail needs a > 0 and b > -1");
  }
  ShapeSpec s;
  s.kind_ = SupportKind::compact;
  s.id_ = std::move(id);
  s.log_psi_ = std::move(parts.log_psi);
  s.u_star_ = parts.u_star;
  s.tail_ = parts.tail;
  return s;
}

ShapeSpec ShapeSpec::non_compact(std::string id, NonCompact parts) {
  if (!parts.lambda) throw ConfigError("non-compact shape '" + id + "' needs Lambda");
  if (!(parts.u_ddag >= 0.0)) {
    throw ConfigError("non-compact shape '" + id + "': u_ddag must be >= 0");
  }
  ShapeSpec s;
  s.kind_ = SupportKind::non_compact;
  s.id_ = std::move(id);
  s.lambda_ = std::move(parts.lambda);
  s.lambda_prime_ = std::move(parts.lambda_prime);
  s.big_L_prime_ = std::move(parts.big_L_prime);
  s.u_ddag_ = parts.u_ddag;
  return s;
}

double ShapeSpec::u_star() const {
  if (!is_compact()) throw DomainError("shape '" + id_ + "' has unbounded support");
  return u_star_;
}

void ShapeSpec::require_non_compact(const char* what) const {
  if (is_compact()) {
    throw DomainError(std::string(what) + " is undefined for compact shape '" + id_ + "'");
  }
}

double ShapeSpec::log_psi(double u) const {
  if (is_compact()) {
    if (u > u_star_) return numerics::kNegInf;
    return log_psi_(u);
  }
  return -lambda_(u);
}

double ShapeSpec::lambda(double u) const {
  require_non_compact("Lambda");
  return lambda_(u);
}

double ShapeSpec::lambda_prime(double u) const {
  require_non_compact("Lambda'");
  if (lambda_prime_) return lambda_prime_(u);
  return central_difference(lambda_, u, kLambdaStep);
}

double ShapeSpec::big_L(double u) const { return u * lambda_prime(u); }

double ShapeSpec::big_L_prime(double u) const {
  require_non_compact("L'");
  if (big_L_prime_) return big_L_prime_(u);
  return central_difference([this](double x) { return big_L(x); }, u, kLStep);
}

// ---------------------------------------------------------------------------
// Built-ins

void validate(const LogPolyParams& p) {
  auto bad = [](const std::string& what, double v) {
    throw ConfigError("logpoly: " + what + " (got " + fmt_g(v) + ")");
  };
  if (!(p.a > 0.0) || !std::isfinite(p.a)) bad("parameter a must be > 0", p.a);
  if (!(p.b >= 0.0) || !std::isfinite(p.b)) bad("parameter b must be >= 0", p.b);
  if (!(p.c > 0.0) || !std::isfinite(p.c)) bad("parameter c must be > 0", p.c);
  if (!std::isfinite(p.alpha)) bad("parameter alpha must be finite", p.alpha);
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) bad("parameter beta must be > 0", p.beta);
}

ShapeSpec uniform_ball() {
  return ShapeSpec::compact("uniform_ball", {[](double) { return 0.0; }, 1.0, PowerTail{1.0, 0.0}});
}

ShapeSpec triangle() {
  return ShapeSpec::compact("triangle",
                            {[](double u) { return std::log(2.0 - u); }, 1.0, PowerTail{1.0, 0.0}});
}

ShapeSpec gaussian() {
  ShapeSpec::NonCompact parts;
  parts.lambda = [](double u) { return 0.5 * u * u; };
  parts.lambda_prime = [](double u) { return u; };
  parts.big_L_prime = [](double u) { return 2.0 * u; };
  parts.u_ddag = 0.0;
  return ShapeSpec::non_compact("gaussian", std::move(parts));
}

ShapeSpec log_poly(const LogPolyParams& p) {
  validate(p);
  const LogPolyTerms terms{p};
  ShapeSpec::NonCompact parts;
  parts.lambda = [terms](double u) { return terms.lambda(u); };
  parts.lambda_prime = [terms](double u) { return terms.lambda_prime(u); };
  parts.big_L_prime = [terms](double u) { return terms.big_L_prime(u); };
  parts.u_ddag = std::max({1.0, p.a, p.b}) + 1.0;
  const std::string id = "logpoly[a=" + fmt_g(p.a) + ";b=" + fmt_g(p.b) + ";c=" + fmt_g(p.c) +
                         ";alpha=" + fmt_g(p.alpha) + ";beta=" + fmt_g(p.beta) + "]";
  return ShapeSpec::non_compact(id, std::move(parts));
}

ShapeSpec power_tail(double a, double b, double u_star) {
  if (!(a > 0.0)) throw ConfigError("power: parameter a must be > 0 (got " + fmt_g(a) + ")");
  if (!(b > -1.0)) throw ConfigError("power: parameter b must be > -1 (got " + fmt_g(b) + ")");
  if (!(u_star > 0.0)) {
    throw ConfigError("power: parameter ustar must be > 0 (got " + fmt_g(u_star) + ")");
  }
  const double log_a = std::log(a);
  ScalarFn log_psi = [log_a, b, u_star](double u) {
    if (b == 0.0) return log_a;
    return log_a + b * std::log(u_star - u);
  };
  const std::string id =
      "power[a=" + fmt_g(a) + ";b=" + fmt_g(b) + ";ustar=" + fmt_g(u_star) + "]";
  return ShapeSpec::compact(id, {std::move(log_psi), u_star, PowerTail{a, b}});
}

ShapeSpec custom_lambda(std::string id, ScalarFn lambda, double u_ddag) {
  ShapeSpec::NonCompact parts;
  parts.lambda = std::move(lambda);
  parts.u_ddag = u_ddag;
  return ShapeSpec::non_compact(std::move(id), std::move(parts));
}

ShapeSpec scaled(const ShapeSpec& shape, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw ConfigError("scale must be positive (got " + fmt_g(s) + ")");
  }
  const std::string id = "scaled[s=" + fmt_g(s) + ";" + shape.id() + "]";
  if (shape.is_compact()) {
    std::optional<PowerTail> tail;
    if (shape.tail()) tail = PowerTail{shape.tail()->a * std::pow(s, -shape.tail()->b), shape.tail()->b};
    return ShapeSpec::compact(
        id, {[shape, s](double u) { return shape.log_psi(u / s); }, shape.u_star() * s, tail});
  }
  ShapeSpec::NonCompact parts;
  parts.lambda = [shape, s](double u) { return shape.lambda(u / s); };
  if (shape.has_analytic_lambda_prime()) {
    parts.lambda_prime = [shape, s](double u) { return shape.lambda_prime(u / s) / s; };
    parts.big_L_prime = [shape, s](double u) { return shape.big_L_prime(u / s) / s; };
  }
  parts.u_ddag = shape.u_ddag() * s;
  return ShapeSpec::non_compact(id, std::move(parts));
}

LogPolyParams log_poly_params(const std::map<std::string, double>& params) {
  LogPolyParams p;
  for (auto [key, field] : {std::pair{"a", &p.a}, std::pair{"b", &p.b}, std::pair{"c", &p.c},
                            std::pair{"alpha", &p.alpha}, std::pair{"beta", &p.beta}}) {
    if (auto it = params.find(key); it != params.end()) *field = it->second;
  }
  return p;
}

ShapeSpec make_shape(const std::string& name, const std::map<std::string, double>& params,
                     const std::string& expression) {
  std::set<std::string> allowed = {"scale"};
  auto get = [&params](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };

  std::optional<ShapeSpec> shape;
  if (name == "uniform_ball" || name == "uniform" || name == "ball") {
    shape = uniform_ball();
  } else if (name == "triangle") {
    shape = triangle();
  } else if (name == "gaussian" || name == "normal") {
    shape = gaussian();
  } else if (name == "logpoly") {
    allowed.insert({"a", "b", "c", "alpha", "beta"});
    shape = log_poly(log_poly_params(params));
  } else if (name == "power") {
    allowed.insert({"a", "b", "ustar"});
    shape = power_tail(get("a", 1.0), get("b", 0.0), get("ustar", 1.0));
  } else if (name == "lambda") {
    allowed.insert("u_ddag");
    if (expression.empty()) throw ConfigError("shape 'lambda' needs an expression for Lambda(u)");
    const Expression expr = Expression::parse(expression);
    shape = custom_lambda("lambda[" + expression + "]", [expr](double u) { return expr(u); },
                          get("u_ddag", 0.0));
  } else {
    throw ConfigError("unknown shape '" + name + "'");
  }
  for (const auto& [key, _] : params) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown parameter '" + key + "' for shape " + name);
    }
  }
  if (params.count("scale")) return scaled(*shape, params.at("scale"));
  return *shape;
}

// ---------------------------------------------------------------------------
// Analytic accessories

double log_psi(const ShapeSpec& shape, double u) { return shape.log_psi(u); }

double big_L(const ShapeSpec& shape, double u) {
  if (shape.is_compact()) throw DomainError("L is undefined for compact shape '" + shape.id() + "'");
  return shape.big_L(u);
}

double big_M(const ShapeSpec& shape, double u) {
  if (!(u > 1.0)) throw DomainError("M(u) needs u > 1 (got " + fmt_g(u) + ")");
  return big_L(shape, u) / std::log(u);
}

TailParams tail_params(const ShapeSpec& shape) {
  if (!shape.is_compact() || !shape.tail()) throw MissingTail(shape.id());
  return {shape.tail()->a, shape.tail()->b, shape.u_star()};
}

numerics::GridSpec default_regularity_grid(const ShapeSpec& shape, double u_hint) {
  numerics::GridSpec grid;
  grid.lo = std::max(shape.u_ddag(), 1.0) * 1.01;
  grid.hi = std::max(1e6, 10.0 * u_hint);
  grid.n_points = 1000;
  grid.spacing = numerics::Spacing::log;
  return grid;
}

RegularityReport check_regularity(const ShapeSpec& shape, const numerics::GridSpec& grid,
                                  const RegularityOptions& options) {
  if (shape.is_compact()) {
    throw DomainError("check_regularity needs a non-compact shape ('" + shape.id() + "')");
  }
  if (grid.n_points < 1000) throw DomainError("check_regularity needs at least 1000 grid points");
  const Eigen::ArrayXd u = numerics::make_grid(grid);
  const Eigen::Index n = u.size();
  const Eigen::ArrayXd L = u.unaryExpr([&shape](double x) { return shape.big_L(x); });

  RegularityReport report;
  report.L_increasing = ((L.tail(n - 1) - L.head(n - 1)) > 0.0).all();

  auto M = [&shape](double x) { return shape.big_L(x) / std::log(x); };
  Eigen::Index first = 0;
  while (first < n && !(u(first) > 1.0)) ++first;
  if (first < n) {
    const Eigen::ArrayXd m = u.tail(n - first).unaryExpr(M);
    Eigen::Index k = m.size() - 1;
    while (k > 0 && m(k - 1) < m(k)) --k;
    report.M_increasing_from = static_cast<std::size_t>(first + k);
    const double run = static_cast<double>(m.size() - k);
    report.M_eventually_increasing = run >= options.m_increasing_fraction * static_cast<double>(n);
    report.M_at_max = m(m.size() - 1);
    report.M_exceeds_threshold = report.M_at_max > options.m_threshold;

    const double top = u(n - 1);
    report.ratios_consistent = true;
    for (double eps : {0.1, 0.5}) {
      RatioSample r{eps, top, numerics::kInf, numerics::kInf};
      const double base = M(top);
      if ((1.0 - eps) * top > 1.0) r.ratio_minus = M((1.0 - eps) * top) / base;
      r.ratio_plus = M((1.0 + eps) * top) / base;
      report.ratios_consistent = report.ratios_consistent && r.ratio_minus <= 1.0 + 1e-9 &&
                                 r.ratio_plus >= 1.0 - 1e-9;
      report.ratios.push_back(r);
    }
  } else {
    report.M_increasing_from = static_cast<std::size_t>(n);
  }
  return report;
}

TailCheck verify_tail(const ShapeSpec& shape, double rel_tol) {
  const TailParams declared = tail_params(shape);
  constexpr int k = 9;
  Eigen::MatrixXd design(k, 2);
  Eigen::VectorXd y(k);
  for (int i = 0; i < k; ++i) {
    const double delta = declared.u_star * std::pow(10.0, -4.0 - 4.0 * i / (k - 1));
    design(i, 0) = 1.0;
    design(i, 1) = std::log(delta);
    y(i) = shape.log_psi(declared.u_star - delta);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  TailCheck out;
  out.a_estimate = std::exp(coef(0));
  out.b_estimate = coef(1);
  out.consistent = std::abs(out.b_estimate - declared.b) <= rel_tol &&
                   std::abs(out.a_estimate / declared.a - 1.0) <= rel_tol;
  return out;
}

}  // namespace radialab
