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

#include "radialab/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

namespace radialab::numerics {

void validate(const GridSpec& grid) {
  if (!(grid.lo < grid.hi)) {
    throw ConfigError("grid: lo must be < hi");
  }
  if (grid.n_points < 2) {
    throw ConfigError("grid: n_points must be >= 2");
  }
  if (grid.spacing == Spacing::log && !(grid.lo > 0.0)) {
    throw ConfigError("grid: log spacing requires lo > 0");
  }
}

Eigen::ArrayXd make_grid(const GridSpec& grid) {
  validate(grid);
  const auto n = static_cast<Eigen::Index>(grid.n_points);
  Eigen::ArrayXd out;
  if (grid.spacing == Spacing::linear) {
    out = Eigen::ArrayXd::LinSpaced(n, grid.lo, grid.hi);
  } else {
    out = Eigen::ArrayXd::LinSpaced(n, std::log(grid.lo), std::log(grid.hi)).exp();
  }
  out(0) = grid.lo;
  out(n - 1) = grid.hi;
  return out;
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(const Eigen::Ref<const Eigen::ArrayXd>& values) {
  if (values.size() == 0) return kNegInf;
  const double m = values.maxCoeff();
  if (m == kNegInf || !std::isfinite(m)) return m;
  return m + std::log((values - m).exp().sum());
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

// Kronrod 15-point abscissae/weights with the embedded 7-point Gauss rule.
// Gauss nodes are kXgk[1], kXgk[3], kXgk[5] and the centre.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

std::string describe(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

template <typename G>
PanelEstimate kronrod_panel(const G& g, double a, double b, long& evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> v{};
  v[14] = g(c);
  for (std::size_t j = 0; j < 7; ++j) {
    v[2 * j] = g(c - h * kXgk[j]);
    v[2 * j + 1] = g(c + h * kXgk[j]);
  }
  evals += 15;
  double m = kNegInf;
  for (double x : v) {
    if (std::isnan(x)) {
      throw NonConvergence("integrand is NaN on [" + describe(a) + ", " + describe(b) + "]");
    }
    if (x == std::numeric_limits<double>::infinity()) {
      throw DivergentIntegral("integrand is infinite on [" + describe(a) + ", " +
                              describe(b) + "]");
    }
    m = std::max(m, x);
  }
  if (m == kNegInf) return {};
  double sk = kWgk[7] * std::exp(v[14] - m);
  double sg = kWg[3] * std::exp(v[14] - m);
  for (std::size_t j = 0; j < 7; ++j) {
    const double pair = std::exp(v[2 * j] - m) + std::exp(v[2 * j + 1] - m);
    sk += kWgk[j] * pair;
    if (j % 2 == 1) sg += kWg[j / 2] * pair;
  }
  PanelEstimate out;
  out.log_value = m + std::log(h * sk);
  const double diff = std::abs(sk - sg);
  out.log_error = diff > 0.0 ? m + std::log(h * diff) : kNegInf;
  return out;
}

enum class PanelMap { plain, tail, singular };

struct Panel {
  PanelMap map;
  double a;  // endpoints in the panel's own variable
  double b;
  PanelEstimate est;
};

class PanelIntegrator {
 public:
  PanelIntegrator(const LogIntegrand& f, double hi, std::optional<double> sing)
      : f_(f), hi_(hi), sing_(sing) {}

  Panel make(PanelMap map, double a, double b) {
    Panel p{map, a, b, {}};
    p.est = evaluate(p);
    return p;
  }

  PanelEstimate evaluate(const Panel& p) {
    switch (p.map) {
      case PanelMap::plain:
        return kronrod_panel(f_, p.a, p.b, evals_);
      case PanelMap::tail:
        return kronrod_panel(
            [this](double t) {
              const double u = tail_origin_ + t / (1.0 - t);
              return f_(u) - 2.0 * std::log1p(-t);
            },
            p.a, p.b, evals_);
      case PanelMap::singular: {
        const double e = 1.0 / (*sing_ + 1.0);
        return kronrod_panel(
            [this, e](double v) {
              double u = hi_ - std::pow(v, e);
              if (u >= hi_) u = std::nextafter(hi_, kNegInf);
              // Jacobian from the rounded distance hi - u, so that it cancels
              // the singular factor of f exactly.
              return f_(u) + std::log(e) - *sing_ * std::log(hi_ - u);
            },
            p.a, p.b, evals_);
      }
    }
    return {};
  }

  /// Panel covering [a, b] in u, choosing the singular map when b touches hi.
  Panel make_u(double a, double b) {
    if (sing_ && b == hi_) {
      return make(PanelMap::singular, 0.0, std::pow(hi_ - a, *sing_ + 1.0));
    }
    return make(PanelMap::plain, a, b);
  }

  void set_tail_origin(double x) { tail_origin_ = x; }
  long evals() const { return evals_; }

 private:
  const LogIntegrand& f_;
  double hi_;
  std::optional<double> sing_;
  double tail_origin_ = 0.0;
  long evals_ = 0;
};

constexpr int kConstantWidthPanels = 8;
constexpr double kPanelGrowth = 1.5;
constexpr double kDivergenceHorizon = 1e250;

}  // namespace

PanelEstimate kronrod15_log(const LogIntegrand& f_log, double a, double b) {
  long evals = 0;
  return kronrod_panel(f_log, a, b, evals);
}

QuadResult integrate_log(const LogIntegrand& f_log, double lo, double hi,
                         double tol) {
  QuadOptions options;
  options.tol = tol;
  return integrate_log(f_log, lo, hi, options);
}

QuadResult integrate_log(const LogIntegrand& f_log, double lo, double hi,
                         const QuadOptions& options) {
  if (!std::isfinite(lo) || std::isnan(hi) || !(lo < hi)) {
    throw DomainError("integrate_log: need finite lo < hi");
  }
  if (!(options.tol > 0.0)) {
    throw DomainError("integrate_log: tol must be positive");
  }
  if (options.hi_singularity &&
      (!std::isfinite(hi) || !(*options.hi_singularity > -1.0))) {
    throw DomainError("integrate_log: singularity needs finite hi and exponent > -1");
  }
  const bool unbounded = std::isinf(hi);
  double peak = options.peak.value_or(unbounded ? lo + 1.0 : 0.5 * (lo + hi));
  peak = std::clamp(peak, lo, unbounded ? std::numeric_limits<double>::max() : hi);
  double scale = options.scale.value_or(unbounded ? 1.0 : (hi - lo) / 8.0);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("integrate_log: scale hint must be positive");
  }

  PanelIntegrator integ(f_log, hi, options.hi_singularity);
  std::vector<Panel> panels;
  double total = kNegInf;
  const double log_small = std::log(options.tol / 10.0);

  auto push = [&](Panel p) {
    total = log_add_exp(total, p.est.log_value);
    const bool small = total > kNegInf && p.est.log_value < total + log_small;
    panels.push_back(p);
    return small;
  };

  // Left march: from the peak down to lo.
  {
    double x = peak;
    double w = scale;
    int consecutive_small = 0;
    std::size_t k = 0;
    while (x > lo) {
      const double a = std::max(x - w, lo);
      consecutive_small = push(integ.make_u(a, x)) ? consecutive_small + 1 : 0;
      x = a;
      if (consecutive_small >= 3 && x > lo) {
        panels.push_back(integ.make_u(lo, x));
        total = log_add_exp(total, panels.back().est.log_value);
        break;
      }
      if (++k > kConstantWidthPanels) w *= kPanelGrowth;
      if (k > options.march_budget) {
        throw NonConvergence("integrate_log: left march exceeded its budget");
      }
    }
  }

  // Right march: from the peak up to hi.
  {
    double x = peak;
    double w = scale;
    int consecutive_small = 0;
    std::size_t k = 0;
    while (x < hi) {
      const double b = unbounded ? x + w : std::min(x + w, hi);
      consecutive_small = push(integ.make_u(x, b)) ? consecutive_small + 1 : 0;
      x = b;
      if (consecutive_small >= 3 && x < hi) {
        if (unbounded) {
          integ.set_tail_origin(x);
          panels.push_back(integ.make(PanelMap::tail, 0.0, 1.0));
        } else {
          panels.push_back(integ.make_u(x, hi));
        }
        total = log_add_exp(total, panels.back().est.log_value);
        break;
      }
      if (++k > kConstantWidthPanels) w *= kPanelGrowth;
      if (k > options.march_budget || (unbounded && x > kDivergenceHorizon)) {
        throw DivergentIntegral(
            "integrate_log: tail panels do not decay (reached u = " + describe(x) + ")");
      }
    }
  }

  if (std::isnan(total) || total == std::numeric_limits<double>::infinity()) {
    throw DivergentIntegral("integrate_log: integral is not finite");
  }
  if (total == kNegInf) {
    return {kNegInf, 0.0, integ.evals()};
  }

  // Worst-first bisection. Sums are tracked relative to a fixed reference.
  const double ref = total;
  auto cmp = [&panels](std::size_t i, std::size_t j) {
    return panels[i].est.log_error < panels[j].est.log_error;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  std::vector<bool> live(panels.size(), true);
  double sum_val = 0.0;
  double sum_err = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    queue.push(i);
    sum_val += std::exp(panels[i].est.log_value - ref);
    sum_err += std::exp(panels[i].est.log_error - ref);
  }
  auto recompute = [&] {
    sum_val = 0.0;
    sum_err = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (!live[i]) continue;
      sum_val += std::exp(panels[i].est.log_value - ref);
      sum_err += std::exp(panels[i].est.log_error - ref);
    }
  };

  // Log-integrand values near `ref` carry absolute rounding error of about
  // eps * |ref|, which bounds the attainable relative accuracy.
  const double target =
      std::max(options.tol, 16.0 * std::numeric_limits<double>::epsilon() * std::abs(ref));
  const double abs_target = options.log_abs_tol ? std::exp(*options.log_abs_tol - ref) : 0.0;
  auto done = [&] { return sum_err <= std::max(target * sum_val, abs_target); };
  std::size_t iterations = 0;
  while (true) {
    if (done()) {
      recompute();
      if (done()) break;
    }
    if (queue.empty() || panels.size() >= options.panel_budget) {
      throw NonConvergence("integrate_log: panel budget exhausted (relative error " +
                           describe(sum_err / sum_val) + ")");
    }
    const std::size_t worst = queue.top();
    queue.pop();
    const Panel parent = panels[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    if (!(mid > parent.a && mid < parent.b)) {
      // Cannot split further; its error stays in the sum.
      continue;
    }
    live[worst] = false;
    sum_val -= std::exp(parent.est.log_value - ref);
    sum_err -= std::exp(parent.est.log_error - ref);
    for (const auto& [a, b] : {std::pair{parent.a, mid}, std::pair{mid, parent.b}}) {
      panels.push_back(integ.make(parent.map, a, b));
      live.push_back(true);
      queue.push(panels.size() - 1);
      sum_val += std::exp(panels.back().est.log_value - ref);
      sum_err += std::exp(panels.back().est.log_error - ref);
    }
    if (++iterations % 64 == 0) recompute();
  }

  QuadResult result;
  result.log_value = ref + std::log(sum_val);
  result.est_rel_error = sum_err / sum_val;
  result.n_evals = integ.evals();
  if (!std::isfinite(result.log_value)) {
    throw DivergentIntegral("integrate_log: integral is not finite");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Root finding

double find_root_increasing(const std::function<double(double)>& g,
                            double target, double bracket_seed,
                            const RootOptions& options) {
  if (!(bracket_seed > 0.0) || !std::isfinite(bracket_seed)) {
    throw DomainError("find_root_increasing: bracket seed must be positive");
  }
  const double tol = std::max(options.rel_tol * std::abs(target), options.abs_tol);
  auto h = [&](double x) {
    const double v = g(x) - target;
    if (std::isnan(v)) {
      throw NonConvergence("find_root_increasing: g is NaN at " + describe(x));
    }
    return v;
  };

  double x = bracket_seed;
  double fx = h(x);
  if (std::abs(fx) <= tol) return x;

  double lo = x, hi = x, flo = fx, fhi = fx;
  if (fx < 0.0) {
    bool found = false;
    for (int i = 0; i < options.max_doublings; ++i) {
      hi = 2.0 * lo;
      fhi = h(hi);
      if (fhi >= 0.0) {
        found = true;
        break;
      }
      lo = hi;
      flo = fhi;
    }
    if (!found) {
      throw BracketFailure("find_root_increasing: g stays below " + describe(target) +
                           " after " + std::to_string(options.max_doublings) +
                           " doublings");
    }
  } else {
    bool found = false;
    for (int i = 0; i < options.max_doublings; ++i) {
      lo = 0.5 * hi;
      flo = h(lo);
      if (flo <= 0.0) {
        found = true;
        break;
      }
      hi = lo;
      fhi = flo;
    }
    if (!found) {
      throw BracketFailure("find_root_increasing: g stays above " + describe(target) +
                           " after " + std::to_string(options.max_doublings) +
                           " halvings");
    }
  }
  if (std::abs(flo) <= tol) return lo;
  if (std::abs(fhi) <= tol) return hi;

  double last_width = hi - lo;
  bool bisect_next = false;
  for (int it = 0; it < options.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    double candidate = mid;
    if (!bisect_next) {
      const double s = lo - flo * (hi - lo) / (fhi - flo);
      if (s > lo && s < hi) candidate = s;
    }
    fx = h(candidate);
    if (std::abs(fx) <= tol) return candidate;
    if (fx < 0.0) {
      lo = candidate;
      flo = fx;
    } else {
      hi = candidate;
      fhi = fx;
    }
    const double width = hi - lo;
    // Secant steps that fail to halve the bracket are followed by a bisection.
    bisect_next = !bisect_next && width > 0.5 * last_width;
    last_width = width;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return std::abs(flo) < std::abs(fhi) ? lo : hi;
    }
  }
  throw NonConvergence("find_root_increasing: iteration limit reached");
}

// ---------------------------------------------------------------------------
// Distribution functions

namespace {

double gamma_p_series(double k, double z) {
  double ap = k;
  double del = 1.0 / k;
  double sum = del;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= z / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-z + k * std::log(z) - std::lgamma(k));
}

double gamma_q_fraction(double k, double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0 - k;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - k);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-17) break;
  }
  return std::exp(-z + k * std::log(z) - std::lgamma(k)) * h;
}

}  // namespace

double gamma_cdf(double x, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("gamma_cdf: shape and rate must be positive");
  }
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double z = rate * x;
  if (z < shape + 1.0) return std::min(1.0, gamma_p_series(shape, z));
  return std::max(0.0, 1.0 - gamma_q_fraction(shape, z));
}

double gamma_quantile(double p, double shape, double rate) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("gamma_quantile: p outside [0, 1]");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return kInf;
  RootOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-16;
  return find_root_increasing([&](double x) { return gamma_cdf(x, shape, rate); }, p,
                              shape / rate, opts);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("normal_quantile: p outside [0, 1]");
  if (p == 0.0) return kNegInf;
  if (p == 1.0) return kInf;
  if (p > 0.5) return -normal_quantile(1.0 - p);

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  // Halley step.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// ---------------------------------------------------------------------------
// Goodness of fit

double ks_statistic(const Eigen::Ref<const Eigen::VectorXd>& sorted,
                    const std::function<double(double)>& cdf) {
  const auto n = sorted.size();
  if (n == 0) throw EmptySample();
  const double dn = static_cast<double>(n);
  double sup = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && sorted(i) < sorted(i - 1)) {
      throw DomainError("ks_statistic: samples are not sorted");
    }
    const double f = cdf(sorted(i));
    const double upper = static_cast<double>(i + 1) / dn;
    const double lower = static_cast<double>(i) / dn;
    sup = std::max({sup, std::abs(upper - f), std::abs(lower - f)});
  }
  return sup;
}

double ks_two_sample(const Eigen::Ref<const Eigen::VectorXd>& sorted_a,
                     const Eigen::Ref<const Eigen::VectorXd>& sorted_b) {
  const auto n = sorted_a.size();
  const auto m = sorted_b.size();
  if (n == 0 || m == 0) throw EmptySample();
  Eigen::Index i = 0, j = 0;
  double sup = 0.0;
  while (i < n && j < m) {
    const double x = std::min(sorted_a(i), sorted_b(j));
    while (i < n && sorted_a(i) <= x) ++i;
    while (j < m && sorted_b(j) <= x) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / static_cast<double>(n) -
                                 static_cast<double>(j) / static_cast<double>(m)));
  }
  return sup;
}

double ks_two_sample_critical(std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 1.358 * std::sqrt((dn + dm) / (dn * dm));
}

double ks_one_sample_critical_99(std::size_t n) {
  return 1.628 / std::sqrt(static_cast<double>(n));
}

}  // namespace radialab::numerics
