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

#include "radialab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

namespace radialab {

using numerics::kInf;
using numerics::kNegInf;

namespace {

constexpr Eigen::Index kCoreNodes = 4096;
constexpr double kWindowSigmas = 12.0;
constexpr double kPadGrowth = 1.5;
constexpr double kTinyCellMass = 1e-16;  // relative to the total
constexpr double kCellRelTol = 1e-12;
constexpr std::size_t kMaxCells = 1u << 18;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Splits cells until each 15-point panel is accurate, collecting the
// refined right endpoints and cell log-masses. The relative target is
// capped below by the rounding noise of log-integrand values of size
// |log_total|.
class CellRefiner {
 public:
  CellRefiner(const numerics::LogIntegrand& f, double log_total)
      : f_(f),
        log_abs_floor_(std::log(kTinyCellMass) + log_total),
        log_rel_(std::log(std::max(kCellRelTol, 16.0 * kEps * std::max(1.0, std::abs(log_total))))) {}

  void add(double a, double b, int depth = 0) {
    const numerics::PanelEstimate e = numerics::kronrod15_log(f_, a, b);
    const double mid = 0.5 * (a + b);
    const double limit = std::max(e.log_value + log_rel_, log_abs_floor_);
    if (e.log_error <= limit || depth >= 60 || !(mid > a && mid < b)) {
      push(b, e.log_value);
      return;
    }
    add(a, mid, depth + 1);
    add(mid, b, depth + 1);
  }

  void push(double b, double log_mass) {
    if (right_.size() >= kMaxCells) {
      throw NonConvergence("cdf table: cell budget exhausted");
    }
    right_.push_back(b);
    log_mass_.push_back(log_mass);
  }

  std::vector<double>& right() { return right_; }
  std::vector<double>& log_mass() { return log_mass_; }

 private:
  const numerics::LogIntegrand& f_;
  double log_abs_floor_;
  double log_rel_;
  std::vector<double> right_;
  std::vector<double> log_mass_;
};

std::vector<double> unique_ascending(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Monotone (Fritsch-Carlson) slopes of y(x) for ascending x, y.
Eigen::ArrayXd monotone_slopes(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const Eigen::Index n = x.size();
  Eigen::ArrayXd delta(n - 1);
  Eigen::ArrayXd h(n - 1);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    h(k) = x(k + 1) - x(k);
    delta(k) = h(k) > 0.0 ? (y(k + 1) - y(k)) / h(k) : kInf;
  }
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(n);
  m(0) = std::isfinite(delta(0)) ? delta(0) : 0.0;
  m(n - 1) = std::isfinite(delta(n - 2)) ? delta(n - 2) : 0.0;
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const double d0 = delta(k - 1);
    const double d1 = delta(k);
    if (std::isfinite(d0) && std::isfinite(d1) && d0 > 0.0 && d1 > 0.0) {
      const double w1 = 2.0 * h(k) + h(k - 1);
      const double w2 = h(k) + 2.0 * h(k - 1);
      m(k) = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
  }
  return m;
}

}  // namespace

std::string RadialLaw::descriptor() const { return shape_.id() + ";d=" + fmt17(d_); }

double RadialLaw::log_integrand(double u) const {
  if (u < 0.0) return kNegInf;
  const double lp = shape_.log_psi(u);
  if (d_ == 0.0) return lp;
  if (u == 0.0) return kNegInf;
  return d_ * std::log(u) + lp;
}

double RadialLaw::cdf_in_cell(Eigen::Index i, double u) const {
  const double a = nodes_(i);
  if (u <= a) return cum_(i);
  const double b = nodes_(i + 1);
  if (u >= b) return cum_(i + 1);
  auto f = [this](double x) { return log_integrand(x); };
  double value;
  if (singular_last_cell_ && i + 2 == nodes_.size()) {
    numerics::QuadOptions opts;
    opts.tol = 1e-12;
    opts.log_abs_tol = std::log(1e-15) + log_table_mass_;
    opts.hi_singularity = shape_.tail()->b;
    opts.peak = b;
    opts.scale = b - u;
    const double upper = numerics::integrate_log(f, u, b, opts).log_value;
    value = cum_(i + 1) - std::exp(upper - log_table_mass_);
  } else {
    value = cum_(i) + std::exp(numerics::kronrod15_log(f, a, u).log_value - log_table_mass_);
  }
  return std::clamp(value, cum_(i), cum_(i + 1));
}

// ---------------------------------------------------------------------------

double mode_radius(const ShapeSpec& shape, double d) {
  if (shape.is_compact()) {
    throw DomainError("mode_radius needs a non-compact shape ('" + shape.id() + "')");
  }
  if (!(d > 0.0)) throw DomainError("mode_radius needs d > 0");
  numerics::RootOptions opts;
  opts.rel_tol = 1e-15;
  opts.abs_tol = 0.0;
  return numerics::find_root_increasing([&shape](double u) { return shape.big_L(u); }, d,
                                        std::max(shape.u_ddag(), 1.0), opts);
}

double concentration_scale(const ShapeSpec& shape, double d) {
  const double u = mode_radius(shape, d);
  return u * shape.big_L_prime(u);
}

RadialLaw build_law(const ShapeSpec& shape, double d, double tol) {
  if (!std::isfinite(d) || d < 0.0 || (!shape.is_compact() && !(d > 0.0))) {
    throw DomainError("build_law: d must be finite and positive (got " + fmt17(d) + ")");
  }
  RadialLaw law(shape);
  law.d_ = d;
  auto f = [&law](double u) { return law.log_integrand(u); };

  numerics::QuadOptions opts;
  opts.tol = tol;
  numerics::QuadResult q;
  double window_lo = 0.0;
  double window_hi = 0.0;

  if (shape.is_compact()) {
    const double u_star = shape.u_star();
    const double b = shape.tail() ? shape.tail()->b : 0.0;
    law.u_d_ = u_star;
    law.singular_last_cell_ = b < 0.0;
    opts.peak = u_star;
    opts.scale = u_star / (std::max(d, 1.0) + std::max(b, 0.0) + 1.0);
    if (b < 0.0) opts.hi_singularity = b;
    q = numerics::integrate_log(f, 0.0, u_star, opts);
  } else {
    try {
      law.u_d_ = mode_radius(shape, d);
    } catch (const BracketFailure&) {
      // Report non-integrability in preference to the failed solve.
      numerics::integrate_log(f, 0.0, kInf, tol);
      throw;
    }
    const double nu = law.u_d_ * shape.big_L_prime(law.u_d_);
    if (std::isfinite(nu) && nu > 0.0) law.nu_d_ = nu;
    const double sigma = law.u_d_ / std::sqrt(law.nu_d_.value_or(1.0));
    opts.peak = law.u_d_;
    opts.scale = sigma;
    q = numerics::integrate_log(f, 0.0, kInf, opts);
    window_lo = std::max(0.0, law.u_d_ - kWindowSigmas * sigma);
    window_hi = law.u_d_ + kWindowSigmas * sigma;
  }
  law.log_inv_cd_ = q.log_value;
  law.quad_rel_error_ = q.est_rel_error;

  // Base nodes, then padding outward until the cells carry negligible mass.
  std::vector<double> base;
  const double log_tiny = std::log(kTinyCellMass) + law.log_inv_cd_;
  auto cell_is_tiny = [&](double a, double b) {
    return numerics::kronrod15_log(f, a, b).log_value < log_tiny;
  };
  auto pad_left = [&](double from, double width) {
    double x = from;
    int tiny = 0;
    while (x > 0.0 && tiny < 3) {
      const double a = std::max(0.0, x - width);
      tiny = cell_is_tiny(a, x) ? tiny + 1 : 0;
      base.push_back(a);
      x = a;
      width *= kPadGrowth;
    }
    base.push_back(0.0);
  };

  if (shape.is_compact()) {
    const double u_star = shape.u_star();
    const double b = shape.tail() ? shape.tail()->b : 0.0;
    const double d_eff = std::max(d, 1.0);
    const double t_max = std::min(40.0 + 10.0 * (b + 1.0), d_eff);
    const double gamma = b < 0.0 ? 1.0 / (b + 1.0) : 1.0;
    for (Eigen::Index j = 0; j < kCoreNodes; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(kCoreNodes - 1);
      const double t = t_max * std::pow(s, gamma);
      base.push_back(std::max(0.0, u_star * (1.0 - t / d_eff)));
    }
    base.push_back(u_star);
    const double lowest = u_star * (1.0 - t_max / d_eff);
    if (lowest > 0.0) pad_left(lowest, u_star * t_max / d_eff / 64.0);
    base.push_back(0.0);
  } else {
    const Eigen::ArrayXd core = Eigen::ArrayXd::LinSpaced(kCoreNodes, window_lo, window_hi);
    base.assign(core.data(), core.data() + core.size());
    const double width = (window_hi - window_lo) / 64.0;
    if (window_lo > 0.0) pad_left(window_lo, width);
    base.push_back(0.0);
    double x = window_hi;
    double w = width;
    int tiny = 0;
    std::size_t steps = 0;
    while (tiny < 3) {
      const double b = x + w;
      tiny = cell_is_tiny(x, b) ? tiny + 1 : 0;
      base.push_back(b);
      x = b;
      w *= kPadGrowth;
      if (++steps > 4000) throw NonConvergence("cdf table: right tail does not decay");
    }
  }
  base = unique_ascending(std::move(base));

  CellRefiner refiner(f, law.log_inv_cd_);
  const std::size_t n_cells = base.size() - 1;
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (law.singular_last_cell_ && i + 1 == n_cells) {
      numerics::QuadOptions sopts;
      sopts.tol = 1e-13;
      sopts.log_abs_tol = std::log(1e-15) + law.log_inv_cd_;
      sopts.hi_singularity = shape.tail()->b;
      sopts.peak = base[i + 1];
      sopts.scale = base[i + 1] - base[i];
      refiner.push(base[i + 1], numerics::integrate_log(f, base[i], base[i + 1], sopts).log_value);
    } else {
      refiner.add(base[i], base[i + 1]);
    }
  }

  const std::vector<double>& right = refiner.right();
  const std::vector<double>& log_mass = refiner.log_mass();
  const auto n = static_cast<Eigen::Index>(right.size()) + 1;
  law.nodes_.resize(n);
  law.nodes_(0) = base.front();
  for (Eigen::Index i = 1; i < n; ++i) law.nodes_(i) = right[static_cast<std::size_t>(i - 1)];

  const Eigen::Map<const Eigen::ArrayXd> masses(log_mass.data(),
                                                static_cast<Eigen::Index>(log_mass.size()));
  law.log_table_mass_ = numerics::log_sum_exp(masses);
  law.cum_.resize(n);
  law.cum_(0) = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    law.cum_(i) = law.cum_(i - 1) + std::exp(masses(i - 1) - law.log_table_mass_);
  }
  law.cum_ /= law.cum_(n - 1);
  law.cum_(n - 1) = 1.0;
  law.slopes_ = monotone_slopes(law.cum_, law.nodes_);
  return law;
}

double log_pdf(const RadialLaw& law, double u) {
  if (u < 0.0) return kNegInf;
  const double lp = law.shape().log_psi(u);
  if (lp == kNegInf) return kNegInf;
  if (law.d() == 0.0) return lp - law.log_inv_cd();
  return law.d() * std::log(u) + lp - law.log_inv_cd();
}

double cdf(const RadialLaw& law, double u) {
  const Eigen::ArrayXd& x = law.nodes_;
  if (!(u > x(0))) return 0.0;
  if (u >= x(x.size() - 1)) return 1.0;
  const auto it = std::upper_bound(x.data(), x.data() + x.size(), u);
  const Eigen::Index i = (it - x.data()) - 1;
  return law.cdf_in_cell(i, u);
}

double quantile(const RadialLaw& law, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("quantile: p must lie in [0, 1] (got " + fmt17(p) + ")");
  }
  const Eigen::ArrayXd& x = law.nodes_;
  const Eigen::ArrayXd& c = law.cum_;
  const Eigen::Index n = x.size();
  if (p == 0.0) return x(0);
  if (p == 1.0) return x(n - 1);

  const auto it = std::upper_bound(c.data(), c.data() + n, p);
  const Eigen::Index i = std::clamp<Eigen::Index>((it - c.data()) - 1, 0, n - 2);
  double lo = x(i);
  double hi = x(i + 1);

  // Monotone cubic Hermite guess.
  const double h = c(i + 1) - c(i);
  double u = 0.5 * (lo + hi);
  if (h > 0.0) {
    const double s = (p - c(i)) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double guess = (2 * s3 - 3 * s2 + 1) * lo + (s3 - 2 * s2 + s) * h * law.slopes_(i) +
                         (-2 * s3 + 3 * s2) * hi + (s3 - s2) * h * law.slopes_(i + 1);
    if (std::isfinite(guess) && guess > lo && guess < hi) u = guess;
  }

  // Safeguarded Newton on the exact cell CDF.
  for (int iter = 0; iter < 100; ++iter) {
    const double r = law.cdf_in_cell(i, u) - p;
    if (r == 0.0) return u;
    if (r < 0.0) {
      lo = u;
    } else {
      hi = u;
    }
    const double density = std::exp(law.log_integrand(u) - law.log_table_mass_);
    double next = u - r / density;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == u || std::abs(next - u) <= 0.5 * kEps * std::abs(u) || hi - lo <= kEps * hi) {
      return next;
    }
    u = next;
  }
  return u;
}

double asym_log_inv_cd(const RadialLaw& law) {
  const ShapeSpec& shape = law.shape();
  const double d = law.d();
  if (shape.is_compact()) {
    const TailParams t = tail_params(shape);
    const double log_beta = std::lgamma(d + 1.0) + std::lgamma(t.b + 1.0) - std::lgamma(d + t.b + 2.0);
    return std::log(t.a) + log_beta + (d + t.b + 1.0) * std::log(t.u_star);
  }
  if (!law.nu_d()) throw DomainError("asym_log_inv_cd: nu_d is unavailable for this law");
  const double u = law.u_d();
  return 0.5 * std::log(2.0 * std::numbers::pi / *law.nu_d()) + (d + 1.0) * std::log(u) -
         shape.lambda(u);
}

double logpoly_ud_asymptotic(const LogPolyParams& p, double d) {
  if (!(d > 1.0)) throw DomainError("logpoly_ud_asymptotic needs d > 1");
  const double log_u = (-std::log(p.c) + (p.alpha - 1.0) * std::log(p.beta) -
                        p.alpha * std::log(std::log(d)) + std::log(d)) /
                       p.beta;
  return std::exp(log_u);
}

// ---------------------------------------------------------------------------
// Limit laws

double LimitLaw::standardize(double u) const {
  if (family == LimitFamily::gamma) return d * (u_ref - u);
  return sqrt_nu * (u / u_ref - 1.0);
}

double LimitLaw::cdf(double t) const {
  if (family == LimitFamily::gamma) return numerics::gamma_cdf(t, gamma_shape, gamma_rate);
  return numerics::normal_cdf(t);
}

double LimitLaw::quantile(double p) const {
  if (family == LimitFamily::gamma) return numerics::gamma_quantile(p, gamma_shape, gamma_rate);
  return numerics::normal_quantile(p);
}

LimitLaw limit_law(const RadialLaw& law) {
  const ShapeSpec& shape = law.shape();
  LimitLaw out;
  out.d = law.d();
  if (shape.is_compact()) {
    const TailParams t = tail_params(shape);
    out.family = LimitFamily::gamma;
    out.gamma_shape = t.b + 1.0;
    out.gamma_rate = 1.0 / t.u_star;
    out.u_ref = t.u_star;
    return out;
  }
  const RegularityReport report =
      check_regularity(shape, default_regularity_grid(shape, law.u_d()));
  if (!report.passes()) {
    throw RegularityFailure("shape '" + shape.id() +
                            "' fails the regularity checks needed for a normal limit");
  }
  if (!law.nu_d()) throw RegularityFailure("nu_d is not positive for '" + shape.id() + "'");
  out.family = LimitFamily::standard_normal;
  out.u_ref = law.u_d();
  out.sqrt_nu = std::sqrt(*law.nu_d());
  return out;
}

double standardized_cdf(const RadialLaw& law, const LimitLaw& limit, double t) {
  if (limit.decreasing()) {
    if (t < 0.0) return 0.0;
    return 1.0 - cdf(law, limit.u_ref - t / limit.d);
  }
  return cdf(law, limit.u_ref * (1.0 + t / limit.sqrt_nu));
}

double deterministic_ks(const RadialLaw& law, const LimitLaw& limit, std::size_t n_grid) {
  if (n_grid < 2) throw DomainError("deterministic_ks needs at least 2 grid points");
  constexpr double tail = 1e-12;
  double lo;
  double hi;
  if (limit.decreasing()) {
    lo = 0.0;
    hi = std::max(limit.quantile(1.0 - tail), limit.standardize(quantile(law, tail)));
  } else {
    lo = std::min(limit.quantile(tail), limit.standardize(quantile(law, tail)));
    hi = std::max(limit.quantile(1.0 - tail), limit.standardize(quantile(law, 1.0 - tail)));
  }
  const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(n_grid), lo, hi);
  double sup = 0.0;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    sup = std::max(sup, std::abs(standardized_cdf(law, limit, t(k)) - limit.cdf(t(k))));
  }
  return sup;
}

}  // namespace radialab
