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
#include <optional>
#include <string>

#include <Eigen/Core>

#include "radialab/numerics.hpp"
#include "radialab/shapes.hpp"

namespace radialab {

/// The magnitude law with density c_d u^d psi(u) on [0, inf).
///
/// Holds log(1/c_d), the concentration radius u_d (u_star for compact
/// shapes), the scale nu_d (non-compact only), and a CDF tabulated on an
/// adaptively refined grid. Immutable once built; safe to share across
/// threads.
class RadialLaw {
 public:
  const ShapeSpec& shape() const { return shape_; }
  double d() const { return d_; }
  double log_inv_cd() const { return log_inv_cd_; }
  double quad_rel_error() const { return quad_rel_error_; }
  double u_d() const { return u_d_; }
  const std::optional<double>& nu_d() const { return nu_d_; }

  /// Table abscissae, ascending, starting at 0.
  const Eigen::ArrayXd& nodes() const { return nodes_; }
  /// CDF at each node: 0 at the first node and exactly 1 at the last.
  const Eigen::ArrayXd& cdf_table() const { return cum_; }
  /// log of the summed cell masses (agrees with log_inv_cd to ~tol).
  double log_table_mass() const { return log_table_mass_; }

  /// "<shape id>;d=<d>", used to label sample batches.
  std::string descriptor() const;

 private:
  friend RadialLaw build_law(const ShapeSpec& shape, double d, double tol);
  friend double cdf(const RadialLaw& law, double u);
  friend double quantile(const RadialLaw& law, double p);

  explicit RadialLaw(ShapeSpec shape) : shape_(std::move(shape)) {}

  double log_integrand(double u) const;
  double cdf_in_cell(Eigen::Index i, double u) const;

  ShapeSpec shape_;
  double d_ = 0.0;
  double log_inv_cd_ = 0.0;
  double quad_rel_error_ = 0.0;
  double u_d_ = 0.0;
  std::optional<double> nu_d_;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd cum_;
  Eigen::ArrayXd slopes_;  // monotone cubic slopes of u as a function of cdf
  double log_table_mass_ = 0.0;
  bool singular_last_cell_ = false;
};

/// Builds the law at exponent d (d >= 1 in general; d >= 0 for compact
/// shapes). Throws DivergentIntegral when u^d psi(u) is not integrable and
/// BracketFailure when L(u) = d has no solution for an integrable shape.
RadialLaw build_law(const ShapeSpec& shape, double d, double tol = 1e-10);

/// -log_inv_cd + d log u + log psi(u); -inf off the support.
double log_pdf(const RadialLaw& law, double u);
double cdf(const RadialLaw& law, double u);
/// Generalized inverse of cdf; quantile(0) = 0, quantile(1) = last table node.
double quantile(const RadialLaw& law, double p);

/// u_d solving L(u_d) = d.
double mode_radius(const ShapeSpec& shape, double d);
/// nu_d = u_d L'(u_d).
double concentration_scale(const ShapeSpec& shape, double d);

/// Leading-order log(1/c_d):
///   non-compact: log sqrt(2 pi / nu_d) + (d + 1) log u_d - Lambda(u_d)
///   compact:     log a + log B(d + 1, b + 1) + (d + b + 1) log u_star
double asym_log_inv_cd(const RadialLaw& law);

/// Closed-form asymptote of u_d for the log-poly family:
/// c^(-1/beta) beta^((alpha-1)/beta) (log d)^(-alpha/beta) d^(1/beta).
double logpoly_ud_asymptotic(const LogPolyParams& params, double d);

enum class LimitFamily { gamma, standard_normal };

/// Limit distribution together with the affine map that standardizes U_d.
struct LimitLaw {
  LimitFamily family = LimitFamily::standard_normal;
  double gamma_shape = 1.0;
  double gamma_rate = 1.0;
  double d = 0.0;
  double u_ref = 1.0;    // u_star (compact) or u_d
  double sqrt_nu = 1.0;  // non-compact only

  /// d (u_star - u) for the Gamma family, sqrt(nu_d) (u / u_d - 1) otherwise.
  double standardize(double u) const;
  double cdf(double t) const;
  double quantile(double p) const;
  /// The compact map is decreasing in u.
  bool decreasing() const { return family == LimitFamily::gamma; }
};

/// Gamma(b + 1, 1 / u_star) for compact shapes (MissingTail without a
/// tail); standard normal for non-compact shapes that pass
/// check_regularity on the default grid (RegularityFailure otherwise).
LimitLaw limit_law(const RadialLaw& law);

/// P(standardize(U_d) <= t) evaluated from the law's CDF.
double standardized_cdf(const RadialLaw& law, const LimitLaw& limit, double t);

/// sup_t |P(standardize(U_d) <= t) - limit.cdf(t)| over a uniform grid of
/// `n_grid` points covering both laws' mass.
double deterministic_ks(const RadialLaw& law, const LimitLaw& limit,
                        std::size_t n_grid = 100000);

}  // namespace radialab
