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

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>

#include <Eigen/Core>

#include "radialab/errors.hpp"

namespace radialab::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class Spacing { linear, log };

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n_points = 2;
  Spacing spacing = Spacing::linear;
};

/// Throws ConfigError when the grid violates lo < hi, n >= 2, or lo > 0 for log spacing.
void validate(const GridSpec& grid);
Eigen::ArrayXd make_grid(const GridSpec& grid);

/// log(exp(a) + exp(b)) without overflow; -inf is the additive identity.
double log_add_exp(double a, double b);
double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& values);

// ---------------------------------------------------------------------------
// Log-domain quadrature

/// Integrand given by its logarithm. May return -inf where the integrand is 0.
using LogIntegrand = std::function<double(double)>;

struct QuadResult {
  double log_value = kNegInf;
  double est_rel_error = 0.0;
  long n_evals = 0;
};

struct QuadOptions {
  double tol = 1e-10;
  /// Location of the integrand's mass; panels are laid out outward from here.
  std::optional<double> peak;
  /// Width of the integrand's bulk around `peak`.
  std::optional<double> scale;
  /// Exponent b in (-1, 0) of an integrable (hi - u)^b singularity at `hi`.
  /// The panel touching `hi` is then integrated in v = (hi - u)^(b+1).
  std::optional<double> hi_singularity;
  /// Also accept once the summed error is below exp(log_abs_tol).
  std::optional<double> log_abs_tol;
  std::size_t panel_budget = 20000;
  std::size_t march_budget = 4000;
};

/// log of the integral of exp(f_log) over (lo, hi); `hi` may be +inf.
///
/// Panels are 15-point Kronrod rules whose embedded 7-point Gauss value
/// provides the error estimate. Starting from the peak hint, panels march
/// outward (widening geometrically) until three consecutive panels carry
/// relative mass below tol/10; the remaining stretch becomes one more panel,
/// mapped through u = x + t/(1-t) when it is unbounded. The panel set is then
/// bisected worst-first until the summed error is below tol times the total.
///
/// Throws DivergentIntegral when the tail refuses to decay and
/// NonConvergence when the panel budget runs out.
QuadResult integrate_log(const LogIntegrand& f_log, double lo, double hi,
                         const QuadOptions& options);
QuadResult integrate_log(const LogIntegrand& f_log, double lo, double hi,
                         double tol = 1e-10);

struct PanelEstimate {
  double log_value = kNegInf;
  double log_error = kNegInf;
};

/// A single 15-point Kronrod panel on [a, b] (no adaptivity).
PanelEstimate kronrod15_log(const LogIntegrand& f_log, double a, double b);

// ---------------------------------------------------------------------------
// Root finding

struct RootOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_doublings = 200;
  int max_iterations = 500;
};

/// Solves g(u) = target for strictly increasing g on (0, inf).
///
/// The bracket grows geometrically from `bracket_seed` (doubling upward or
/// halving downward), after which bisection interleaved with secant steps
/// narrows it until |g(u) - target| <= max(rel_tol |target|, abs_tol).
double find_root_increasing(const std::function<double(double)>& g,
                            double target, double bracket_seed,
                            const RootOptions& options = {});

// ---------------------------------------------------------------------------
// Distribution functions

/// Regularized lower incomplete gamma P(shape, rate * x).
double gamma_cdf(double x, double shape, double rate);
/// Generalized inverse of gamma_cdf.
double gamma_quantile(double p, double shape, double rate);

double normal_cdf(double x);
/// Rational approximation polished by one Halley step on normal_cdf.
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Goodness of fit

/// One-sample Kolmogorov-Smirnov distance. `sorted` must be ascending.
double ks_statistic(const Eigen::Ref<const Eigen::VectorXd>& sorted,
                    const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance between two ascending samples.
double ks_two_sample(const Eigen::Ref<const Eigen::VectorXd>& sorted_a,
                     const Eigen::Ref<const Eigen::VectorXd>& sorted_b);

/// c(alpha) sqrt((n + m) / (n m)) with c(0.05) = 1.358.
double ks_two_sample_critical(std::size_t n, std::size_t m);

/// 99% quantile of the Kolmogorov distribution over sqrt(n): 1.628 / sqrt(n).
double ks_one_sample_critical_99(std::size_t n);

}  // namespace radialab::numerics
