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

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radialab/numerics.hpp"

namespace radialab {

enum class SupportKind { compact, non_compact };

/// Boundary behaviour psi(u) ~ a (u_star - u)^b as u approaches u_star.
struct PowerTail {
  double a = 1.0;
  double b = 0.0;
};

struct TailParams {
  double a;
  double b;
  double u_star;
};

using ScalarFn = std::function<double(double)>;

/// A shape function psi described through log psi and, for unbounded
/// support, Lambda = -log psi with its derivatives.
///
/// Instances are immutable; copies share nothing mutable and may be read
/// from any number of threads.
class ShapeSpec {
 public:
  struct Compact {
    ScalarFn log_psi;
    double u_star = 1.0;
    std::optional<PowerTail> tail;
  };

  struct NonCompact {
    ScalarFn lambda;
    /// Optional; central differences with step u * 1e-6 otherwise.
    ScalarFn lambda_prime;
    /// Optional derivative of L(u) = u Lambda'(u); central differences otherwise.
    ScalarFn big_L_prime;
    double u_ddag = 0.0;
  };

  static ShapeSpec compact(std::string id, Compact parts);
  static ShapeSpec non_compact(std::string id, NonCompact parts);

  SupportKind kind() const { return kind_; }
  bool is_compact() const { return kind_ == SupportKind::compact; }
  const std::string& id() const { return id_; }

  /// Supremum of the support; DomainError for non-compact shapes.
  double u_star() const;
  const std::optional<PowerTail>& tail() const { return tail_; }
  double u_ddag() const { return u_ddag_; }

  double log_psi(double u) const;
  double lambda(double u) const;
  double lambda_prime(double u) const;
  double big_L(double u) const;
  double big_L_prime(double u) const;
  bool has_analytic_lambda_prime() const { return static_cast<bool>(lambda_prime_); }

 private:
  ShapeSpec() = default;
  void require_non_compact(const char* what) const;

  SupportKind kind_ = SupportKind::compact;
  std::string id_;
  ScalarFn log_psi_;
  double u_star_ = 0.0;
  std::optional<PowerTail> tail_;
  ScalarFn lambda_;
  ScalarFn lambda_prime_;
  ScalarFn big_L_prime_;
  double u_ddag_ = 0.0;
};

struct LogPolyParams {
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  double alpha = 0.0;
  double beta = 1.0;
};

/// Throws ConfigError naming the first parameter outside its range.
void validate(const LogPolyParams& p);

ShapeSpec uniform_ball();
ShapeSpec triangle();
ShapeSpec gaussian();
/// Lambda(u) = c log(u + a)^alpha (u + b)^beta.
ShapeSpec log_poly(const LogPolyParams& p);
/// psi(u) = a (u_star - u)^b on [0, u_star].
ShapeSpec power_tail(double a, double b, double u_star = 1.0);
/// Non-compact shape with a user-supplied Lambda; derivatives by differences.
ShapeSpec custom_lambda(std::string id, ScalarFn lambda, double u_ddag = 0.0);
/// psi_s(u) = psi(u / s).
ShapeSpec scaled(const ShapeSpec& shape, double s);

/// LogPoly fields from a parameter map; missing keys keep their defaults.
LogPolyParams log_poly_params(const std::map<std::string, double>& params);

/// Builds a shape from a config block: a builtin name plus numeric
/// parameters, e.g. {"logpoly", {a: 1, beta: 2}}. The name "lambda" takes
/// its Lambda(u) from `expression`.
ShapeSpec make_shape(const std::string& name, const std::map<std::string, double>& params,
                     const std::string& expression = {});

double log_psi(const ShapeSpec& shape, double u);
/// L(u) = u Lambda'(u); DomainError for compact shapes.
double big_L(const ShapeSpec& shape, double u);
/// M(u) = L(u) / log u; DomainError for compact shapes or u <= 1.
double big_M(const ShapeSpec& shape, double u);
/// Declared (a, b, u_star); MissingTail when no tail was declared.
TailParams tail_params(const ShapeSpec& shape);

struct RegularityOptions {
  double m_threshold = 10.0;
  /// Fraction of the grid (from the top) on which M must be increasing.
  double m_increasing_fraction = 0.1;
};

struct RatioSample {
  double eps;
  double u;
  double ratio_minus;  // M((1 - eps) u) / M(u)
  double ratio_plus;   // M((1 + eps) u) / M(u)
};

/// Finite-grid evidence for the non-compact regularity assumptions.
struct RegularityReport {
  bool L_increasing = false;
  bool M_eventually_increasing = false;
  /// Grid index from which M is strictly increasing (grid size if never).
  std::size_t M_increasing_from = 0;
  bool M_exceeds_threshold = false;
  double M_at_max = 0.0;
  std::vector<RatioSample> ratios;
  bool ratios_consistent = false;

  bool passes() const {
    return L_increasing && M_eventually_increasing && M_exceeds_threshold && ratios_consistent;
  }
};

/// Requires a non-compact shape and a grid of at least 1000 points.
RegularityReport check_regularity(const ShapeSpec& shape, const numerics::GridSpec& grid,
                                  const RegularityOptions& options = {});

/// Log-spaced grid used when no explicit grid is given: from
/// max(u_ddag, 1) * 1.01 up to max(1e6, 10 * u_hint).
numerics::GridSpec default_regularity_grid(const ShapeSpec& shape, double u_hint = 1.0);

struct TailCheck {
  double a_estimate;
  double b_estimate;
  bool consistent;
};

/// Compares the declared tail against a log-log regression of psi on
/// u_star - delta, delta in [1e-8, 1e-4] * u_star.
TailCheck verify_tail(const ShapeSpec& shape, double rel_tol = 0.05);

}  // namespace radialab
