#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gdge/core_dge.hpp"
#include "gdge/errors.hpp"
#include "gdge/latent.hpp"
#include "gdge/numeric.hpp"
#include "gdge/random.hpp"
#include "gdge/ugdge.hpp"

namespace gdge {

/// BGDGE(alpha1, alpha2, p1, p2, theta): coordinatewise maxima of N ~ GM(theta)
/// independent pairs of DGE(alpha1, p1) and DGE(alpha2, p2) variates.
class BgdgeParams {
 public:
  BgdgeParams(DgeParams m1, DgeParams m2, double theta) : m1_(m1), m2_(m2), theta_(theta) {
    if (!(theta > 0 && theta <= 1)) throw DomainError("geometric parameter theta must lie in (0, 1]");
  }
  BgdgeParams(double alpha1, double p1, double alpha2, double p2, double theta)
      : BgdgeParams(DgeParams(alpha1, p1), DgeParams(alpha2, p2), theta) {}

  const DgeParams& m1() const noexcept { return m1_; }
  const DgeParams& m2() const noexcept { return m2_; }
  double theta() const noexcept { return theta_; }

  friend bool operator==(const BgdgeParams& a, const BgdgeParams& b) noexcept {
    return a.m1_ == b.m1_ && a.m2_ == b.m2_ && a.theta_ == b.theta_;
  }

 private:
  DgeParams m1_;
  DgeParams m2_;
  double theta_;
};

struct BivCell {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend auto operator<=>(const BivCell&, const BivCell&) = default;
};

enum class Axis { X, Y };

inline double bgdge_cdf(const BgdgeParams& params, double x, double y) {
  const double lz = dge_log_cdf(params.m1(), x) + dge_log_cdf(params.m2(), y);
  if (lz == -kInf) return 0.0;
  return std::exp(std::log(params.theta()) + lz - detail::log_mo_denominator(params.theta(), lz));
}

/// theta F2(y) f1(x) / ([1 - (1-theta) F1(x) F2(y)] [1 - (1-theta) F1(x-1) F2(y)]);
/// zero for y = -1. The joint pmf is g(x, y) - g(x, y-1).
inline double g_func(const BgdgeParams& params, std::int64_t x, std::int64_t y) {
  if (x < 0) throw DomainError("g_func: x must be nonnegative");
  if (y < -1) throw DomainError("g_func: y must be at least -1");
  if (y == -1) return 0.0;
  const double t = params.theta();
  const double lb = dge_log_cdf(params.m2(), static_cast<double>(y));
  const double la1 = dge_log_cdf(params.m1(), static_cast<double>(x));
  const double la0 = dge_log_cdf(params.m1(), static_cast<double>(x - 1));
  return std::exp(std::log(t) + lb + dge_log_pmf(params.m1(), x) - detail::log_mo_denominator(t, la1 + lb) -
                  detail::log_mo_denominator(t, la0 + lb));
}

/// Joint pmf in the factorized form
///   theta f1 f2 (1 - c^2 a1 a0 b1 b0) / (D(a1 b1) D(a0 b1) D(a1 b0) D(a0 b0)),
/// c = 1-theta, a = F1 at x and x-1, b = F2 at y and y-1, D(z) = 1 - c z.
inline double bgdge_log_pmf(const BgdgeParams& params, BivCell cell) {
  if (cell.x < 0 || cell.y < 0) throw DomainError("bgdge_pmf: cell coordinates must be nonnegative");
  const double t = params.theta();
  const double la1 = dge_log_cdf(params.m1(), static_cast<double>(cell.x));
  const double la0 = dge_log_cdf(params.m1(), static_cast<double>(cell.x - 1));
  const double lb1 = dge_log_cdf(params.m2(), static_cast<double>(cell.y));
  const double lb0 = dge_log_cdf(params.m2(), static_cast<double>(cell.y - 1));
  double v = std::log(t) + dge_log_pmf(params.m1(), cell.x) + dge_log_pmf(params.m2(), cell.y);
  if (t < 1) {
    const double c = 1 - t;
    v += std::log1p(-c * c * std::exp(la1 + la0 + lb1 + lb0));
    v -= detail::log_mo_denominator(t, la1 + lb1) + detail::log_mo_denominator(t, la0 + lb1) +
         detail::log_mo_denominator(t, la1 + lb0) + detail::log_mo_denominator(t, la0 + lb0);
  }
  return v;
}

inline double bgdge_pmf(const BgdgeParams& params, BivCell cell) { return std::exp(bgdge_log_pmf(params, cell)); }

/// Joint pmf as g(x, y) - g(x, y-1); tiny negative roundoff above -1e-13 is clamped to 0.
inline double bgdge_pmf_g_difference(const BgdgeParams& params, BivCell cell) {
  if (cell.x < 0 || cell.y < 0) throw DomainError("bgdge_pmf: cell coordinates must be nonnegative");
  const double v = g_func(params, cell.x, cell.y) - g_func(params, cell.x, cell.y - 1);
  if (v < -1e-13) throw EvaluationError("bgdge_pmf: g difference is negative beyond roundoff");
  return v < 0 ? 0.0 : v;
}

inline UgdgeParams marginal_params(const BgdgeParams& params, Axis which) {
  return UgdgeParams(which == Axis::X ? params.m1() : params.m2(), params.theta());
}

/// Law of X given Y <= y: UGDGE(alpha1, p1, 1 - (1-theta) F2(y)).
inline UgdgeParams cond_given_le(const BgdgeParams& params, std::int64_t y) {
  if (y < 0) throw DomainError("cond_given_le: y must be nonnegative");
  const double star = 1 - (1 - params.theta()) * dge_cdf(params.m2(), static_cast<double>(y));
  return UgdgeParams(params.m1(), star);
}

/// Law of max(X, Y) when p1 = p2.
inline UgdgeParams max_params(const BgdgeParams& params) {
  const double p1 = params.m1().p();
  const double p2 = params.m2().p();
  if (std::abs(p1 - p2) > 1e-12 * std::max(p1, p2))
    throw DomainError("max_params: requires p1 == p2");
  return UgdgeParams(params.m1().alpha() + params.m2().alpha(), p1, params.theta());
}

/// P(X <= x | Y = y) = A D(b1) D(b0) / (D(A b1) D(A b0)), A = F1(x), b = F2 at y, y-1.
inline double cond_cdf_given_eq(const BgdgeParams& params, double x, std::int64_t y) {
  if (y < 0) throw DomainError("cond_cdf_given_eq: y must be nonnegative");
  if (dge_log_pmf(params.m2(), y) == -kInf)
    throw DomainError("cond_cdf_given_eq: P(Y = y) is zero at y = " + std::to_string(y));
  const double la = dge_log_cdf(params.m1(), x);
  if (la == -kInf) return 0.0;
  const double t = params.theta();
  const double lb1 = dge_log_cdf(params.m2(), static_cast<double>(y));
  const double lb0 = dge_log_cdf(params.m2(), static_cast<double>(y - 1));
  using detail::log_mo_denominator;
  return std::exp(la + log_mo_denominator(t, lb1) + log_mo_denominator(t, lb0) - log_mo_denominator(t, la + lb1) -
                  log_mo_denominator(t, la + lb0));
}

namespace detail {
inline LatentCountKernel latent_kernel(const BgdgeParams& params, BivCell cell) {
  const LatentFactor f[2] = {LatentFactor::make(params.m1(), cell.x), LatentFactor::make(params.m2(), cell.y)};
  return LatentCountKernel(params.theta(), f, 2);
}
}  // namespace detail

/// P(N = n | X = x, Y = y).
inline double biv_cond_n_pmf(const BgdgeParams& params, BivCell cell, std::int64_t n) {
  const double lp = bgdge_log_pmf(params, cell);
  if (lp == -kInf) throw DomainError("biv_cond_n_pmf: cell has zero probability");
  if (n < 1) return 0.0;
  return std::exp(detail::latent_kernel(params, cell).log_joint(static_cast<double>(n)) - lp);
}

inline std::int64_t biv_cond_n_argmax(const BgdgeParams& params, BivCell cell, std::int64_t cap = kDefaultCountCap) {
  if (cell.x < 0 || cell.y < 0) throw DomainError("biv_cond_n_argmax: cell coordinates must be nonnegative");
  return detail::latent_kernel(params, cell).argmax(cap);
}

inline double biv_cond_n_mean(const BgdgeParams& params, BivCell cell, double eps, std::int64_t cap = kSeriesCap) {
  if (bgdge_log_pmf(params, cell) == -kInf) throw DomainError("biv_cond_n_mean: cell has zero probability");
  return detail::latent_kernel(params, cell).mean(eps, cap);
}

/// Closed form of E(N | X = x, Y = y) via F(x, y) a(x, y) = theta z / (1 - (1-theta) z)^2.
inline double biv_cond_n_mean_closed_form(const BgdgeParams& params, BivCell cell) {
  const double t = params.theta();
  const double c = 1 - t;
  auto fa = [&](std::int64_t x, std::int64_t y) {
    const double z = dge_cdf(params.m1(), static_cast<double>(x)) * dge_cdf(params.m2(), static_cast<double>(y));
    return t * z / ((1 - c * z) * (1 - c * z));
  };
  const double num = fa(cell.x, cell.y) - fa(cell.x - 1, cell.y) - fa(cell.x, cell.y - 1) + fa(cell.x - 1, cell.y - 1);
  return num / bgdge_pmf(params, cell);
}

template <class Urbg>
BivCell bgdge_sample(const BgdgeParams& params, Urbg& g) {
  const double n = static_cast<double>(sample_geometric(params.theta(), g));
  const GeParams u(n * params.m1().alpha(), params.m1().lambda());
  const GeParams v(n * params.m2().alpha(), params.m2().lambda());
  const double xu = ge_sample(u, g);
  const double yv = ge_sample(v, g);
  return {static_cast<std::int64_t>(std::floor(xu)), static_cast<std::int64_t>(std::floor(yv))};
}

/// Law of the coordinatewise maximum of M ~ GM(q) i.i.d. pairs.
inline BgdgeParams biv_compound_geometric_params(const BgdgeParams& params, double q) {
  if (!(q > 0 && q <= 1)) throw DomainError("biv_compound_geometric_params: q must lie in (0, 1)");
  return BgdgeParams(params.m1(), params.m2(), q * params.theta());
}

namespace detail {

/// sum_{x,y} w1^x w2^y pmf(x, y) over a box chosen so that the bound
/// pmf(x, y) <= K p1^x p2^y leaves less than eps outside it.
inline double bgdge_power_series(const BgdgeParams& params, double w1, double w2, double eps) {
  const double t = params.theta();
  const double c = 1 - t;
  const double a1 = params.m1().alpha();
  const double a2 = params.m2().alpha();
  const double k = a1 * a2 * (1 + c) / (t * t) + (a1 + a2) / t + 1;
  const double r1 = std::abs(w1) * params.m1().p();
  const double r2 = std::abs(w2) * params.m2().p();
  const double scale = k / ((1 - r1) * (1 - r2));
  auto horizon = [&](double r) {
    if (r == 0) return std::int64_t{0};
    const double h = std::ceil(std::log(eps / (2 * scale)) / std::log(r));
    return static_cast<std::int64_t>(std::max(0.0, h));
  };
  constexpr std::int64_t kBoxCap = 20000;
  const std::int64_t hx = horizon(r1);
  const std::int64_t hy = horizon(r2);
  if (hx > kBoxCap || hy > kBoxCap) throw ResourceError("bivariate generating-function box exceeds cap");
  double sum = 0.0;
  double wx = 1.0;
  for (std::int64_t x = 0; x <= hx; ++x) {
    double wy = 1.0;
    for (std::int64_t y = 0; y <= hy; ++y) {
      sum += wx * wy * bgdge_pmf(params, {x, y});
      wy *= w2;
    }
    wx *= w1;
  }
  return sum;
}

}  // namespace detail

inline double bgdge_pgf(const BgdgeParams& params, double u, double v, double eps) {
  if (!(std::abs(u) < 1 && std::abs(v) < 1)) throw DomainError("bgdge_pgf: arguments must satisfy |u|, |v| < 1");
  return detail::bgdge_power_series(params, u, v, eps);
}

inline double bgdge_mgf(const BgdgeParams& params, double t1, double t2, double eps) {
  if (!(t1 < -params.m1().log_p() && t2 < -params.m2().log_p()))
    throw DomainError("bgdge_mgf: need t1 < -ln p1 and t2 < -ln p2");
  return detail::bgdge_power_series(params, std::exp(t1), std::exp(t2), eps);
}

}  // namespace gdge
