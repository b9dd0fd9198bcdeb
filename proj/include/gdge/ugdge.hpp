#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gdge/core_dge.hpp"
#include "gdge/errors.hpp"
#include "gdge/latent.hpp"
#include "gdge/numeric.hpp"
#include "gdge/random.hpp"

namespace gdge {

/// UGDGE(alpha, p, theta): maximum of N ~ GM(theta) i.i.d. DGE(alpha, p) variates.
class UgdgeParams {
 public:
  UgdgeParams(double alpha, double p, double theta) : UgdgeParams(DgeParams(alpha, p), theta) {}
  UgdgeParams(DgeParams base, double theta) : base_(base), theta_(theta) {
    if (!(theta > 0 && theta <= 1)) throw DomainError("geometric parameter theta must lie in (0, 1]");
  }
  const DgeParams& base() const noexcept { return base_; }
  double alpha() const noexcept { return base_.alpha(); }
  double p() const noexcept { return base_.p(); }
  double theta() const noexcept { return theta_; }

  friend bool operator==(const UgdgeParams& a, const UgdgeParams& b) noexcept {
    return a.base_ == b.base_ && a.theta_ == b.theta_;
  }

 private:
  DgeParams base_;
  double theta_;
};

inline constexpr std::int64_t kSeriesCap = 1000000;

namespace detail {

/// ln[1 - (1-theta) e^{log_f}], the Marshall-Olkin denominator at base cdf value e^{log_f}.
inline double log_mo_denominator(double theta, double log_f) {
  if (theta == 1.0 || log_f == -kInf) return 0.0;
  return std::log1p(-(1.0 - theta) * std::exp(log_f));
}

/// Bound K with P(X = x) <= K p^x, from f_DGE(x; s, p) <= max(s, 1) p^x summed over N.
inline double pmf_geometric_bound(double alpha, double theta) { return alpha / theta + 1.0; }

}  // namespace detail

/// theta F / (1 - (1-theta) F) with F = F_DGE(x).
inline double ugdge_cdf(const UgdgeParams& params, double x) {
  const double lf = dge_log_cdf(params.base(), x);
  if (lf == -kInf) return 0.0;
  return std::exp(std::log(params.theta()) + lf - detail::log_mo_denominator(params.theta(), lf));
}

inline double ugdge_log_pmf(const UgdgeParams& params, std::int64_t x) {
  if (x < 0) throw DomainError("ugdge_pmf: x must be nonnegative, got " + std::to_string(x));
  const double t = params.theta();
  const double lf1 = dge_log_cdf(params.base(), static_cast<double>(x));
  const double lf0 = dge_log_cdf(params.base(), static_cast<double>(x - 1));
  return std::log(t) + dge_log_pmf(params.base(), x) - detail::log_mo_denominator(t, lf1) -
         detail::log_mo_denominator(t, lf0);
}

inline double ugdge_pmf(const UgdgeParams& params, std::int64_t x) { return std::exp(ugdge_log_pmf(params, x)); }

/// Weight w(x) with pmf(x) = w(x) f_DGE(x).
inline double ugdge_weight(const UgdgeParams& params, std::int64_t x) {
  const double t = params.theta();
  const double f1 = dge_cdf(params.base(), static_cast<double>(x));
  const double f0 = dge_cdf(params.base(), static_cast<double>(x - 1));
  return t / ((1 - (1 - t) * f1) * (1 - (1 - t) * f0));
}

/// Weight w*(x) with h(x) = w*(x) h_DGE(x), both hazards taken as f(x) / P(X >= x).
/// The DGE cdf enters at x, not x - 1: the x - 1 factor cancels against the survival.
inline double ugdge_hazard_weight(const UgdgeParams& params, std::int64_t x) {
  const double t = params.theta();
  return t / (1 - (1 - t) * dge_cdf(params.base(), static_cast<double>(x)));
}

inline double ugdge_hazard(const UgdgeParams& params, std::int64_t x) {
  if (x < 0) throw DomainError("ugdge_hazard: x must be nonnegative");
  if (x == 0) return ugdge_pmf(params, 0);
  // 1 - F(x-1) = (1 - G) / (1 - (1-theta) G), G = F_DGE(x-1)
  const double lg = dge_log_cdf(params.base(), static_cast<double>(x - 1));
  const double log_surv = log1mexp(-lg) - detail::log_mo_denominator(params.theta(), lg);
  if (log_surv == -kInf) throw DomainError("ugdge_hazard: survival underflows at x = " + std::to_string(x));
  return std::exp(ugdge_log_pmf(params, x) - log_surv);
}

/// Smallest integer q with F(q) >= gamma.
inline std::int64_t ugdge_quantile(const UgdgeParams& params, double gamma) {
  if (!(gamma > 0 && gamma < 1)) throw DomainError("ugdge_quantile: gamma must lie in (0, 1)");
  const double t = params.theta();
  const double ratio = gamma / (t + gamma * (1 - t));
  // xi = ln(1 - ratio^{1/alpha}) / ln p - 1
  const double xi = std::log(-std::expm1(std::log(ratio) / params.alpha())) / params.base().log_p() - 1.0;
  std::int64_t q = xi <= 0 ? 0 : static_cast<std::int64_t>(std::ceil(xi));
  while (ugdge_cdf(params, static_cast<double>(q)) < gamma) ++q;
  while (q > 0 && ugdge_cdf(params, static_cast<double>(q - 1)) >= gamma) --q;
  return q;
}

/// E(X^r) = sum_{x>=1} (x^r - (x-1)^r) P(X >= x), truncated once the remaining
/// terms are bounded below eps * (partial + 1).
inline double ugdge_moment(const UgdgeParams& params, int r, double eps, std::int64_t cap = kSeriesCap) {
  if (r < 1) throw DomainError("ugdge_moment: order must be at least 1");
  if (!(eps > 0)) throw DomainError("ugdge_moment: eps must be positive");
  const double t = params.theta();
  const double a = params.alpha();
  const double p = params.p();
  const double bound_scale = std::max(a, 1.0) / t;
  double sum = 0.0;
  for (std::int64_t x = 1;; ++x) {
    const double dx = static_cast<double>(x);
    const double g = std::exp(a * std::log1p(-std::pow(p, dx)));  // F_DGE(x-1)
    const double surv = -std::expm1(a * std::log1p(-std::pow(p, dx))) / (1 - (1 - t) * g);
    const double weight = std::pow(dx, r) - std::pow(dx - 1, r);
    sum += weight * surv;
    // term bound b(x) = scale r x^{r-1} p^x; successive ratio p ((x+1)/x)^{r-1}
    const double rho = p * std::pow((dx + 1) / dx, r - 1);
    if (rho < 1) {
      const double next = bound_scale * r * std::pow(dx + 1, r - 1) * std::pow(p, dx + 1);
      if (next / (1 - rho) < eps * (sum + 1)) return sum;
    }
    if (x >= cap) throw ResourceError("ugdge_moment: truncation horizon exceeded cap " + std::to_string(cap));
  }
}

namespace detail {

/// sum_x w^x pmf(x) for 0 <= |w| p < 1 with tail bound K (|w| p)^{X+1} / (1 - |w| p) < eps.
inline double ugdge_power_series(const UgdgeParams& params, double w, double eps, std::int64_t cap) {
  const double rho = std::abs(w) * params.p();
  const double k = pmf_geometric_bound(params.alpha(), params.theta());
  double sum = 0.0;
  double wx = 1.0;
  for (std::int64_t x = 0;; ++x) {
    sum += wx * ugdge_pmf(params, x);
    wx *= w;
    if (k * std::pow(rho, static_cast<double>(x + 1)) / (1 - rho) < eps) return sum;
    if (x >= cap) throw ResourceError("generating-function series exceeded cap " + std::to_string(cap));
  }
}

}  // namespace detail

/// E(z^X) for |z| < 1 by direct summation.
inline double ugdge_pgf(const UgdgeParams& params, double z, double eps, std::int64_t cap = kSeriesCap) {
  if (!(std::abs(z) < 1)) throw DomainError("ugdge_pgf: |z| must be below 1");
  return detail::ugdge_power_series(params, z, eps, cap);
}

/// E(e^{tX}) for t < -ln p by direct summation.
inline double ugdge_mgf(const UgdgeParams& params, double t, double eps, std::int64_t cap = kSeriesCap) {
  if (!(t < -params.base().log_p())) throw DomainError("ugdge_mgf: t must be below -ln p");
  return detail::ugdge_power_series(params, std::exp(t), eps, cap);
}

/// Partial sum of the DGE mixture theta sum_{k<terms} (1-theta)^k F_DGE(x)^{k+1}.
inline double ugdge_mixture_cdf(const UgdgeParams& params, double x, int terms) {
  if (terms < 1) throw DomainError("ugdge_mixture_cdf: need at least one term");
  const double lf = dge_log_cdf(params.base(), x);
  if (lf == -kInf) return 0.0;
  const double t = params.theta();
  double sum = 0.0;
  double c = 1.0;
  for (int k = 0; k < terms; ++k) {
    sum += c * std::exp(static_cast<double>(k + 1) * lf);
    c *= 1 - t;
  }
  return t * sum;
}

/// Draw N ~ GM(theta), then floor of GE(N alpha, -ln p) by inversion.
template <class Urbg>
std::int64_t ugdge_sample(const UgdgeParams& params, Urbg& g) {
  const std::int64_t n = sample_geometric(params.theta(), g);
  const GeParams ge(static_cast<double>(n) * params.alpha(), params.base().lambda());
  return static_cast<std::int64_t>(std::floor(ge_sample(ge, g)));
}

/// Floor of a continuous Marshall-Olkin GE draw, inverting its cdf in one uniform.
template <class Urbg>
std::int64_t ugdge_sample_continuous_route(const UgdgeParams& params, Urbg& g) {
  const double u = uniform_open01(g);
  const double t = params.theta();
  const double base_u = u / (t + (1 - t) * u);
  const GeParams ge(params.alpha(), params.base().lambda());
  return static_cast<std::int64_t>(std::floor(ge_sample(ge, base_u)));
}

namespace detail {
inline LatentCountKernel latent_kernel(const UgdgeParams& params, std::int64_t x) {
  const LatentFactor f = LatentFactor::make(params.base(), x);
  return LatentCountKernel(params.theta(), &f, 1);
}
}  // namespace detail

/// P(N = n | X = x).
inline double cond_n_pmf(const UgdgeParams& params, std::int64_t x, std::int64_t n) {
  if (x < 0) throw DomainError("cond_n_pmf: x must be nonnegative");
  if (n < 1) return 0.0;
  const double lp = ugdge_log_pmf(params, x);
  if (lp == -kInf) throw DomainError("cond_n_pmf: P(X = x) is zero at x = " + std::to_string(x));
  return std::exp(detail::latent_kernel(params, x).log_joint(static_cast<double>(n)) - lp);
}

/// Smallest n maximizing P(N = n | X = x).
inline std::int64_t cond_n_argmax(const UgdgeParams& params, std::int64_t x, std::int64_t cap = kDefaultCountCap) {
  if (x < 0) throw DomainError("cond_n_argmax: x must be nonnegative");
  return detail::latent_kernel(params, x).argmax(cap);
}

inline double cond_n_mean(const UgdgeParams& params, std::int64_t x, double eps, std::int64_t cap = kSeriesCap) {
  if (x < 0) throw DomainError("cond_n_mean: x must be nonnegative");
  if (ugdge_log_pmf(params, x) == -kInf) throw DomainError("cond_n_mean: P(X = x) is zero");
  return detail::latent_kernel(params, x).mean(eps, cap);
}

/// Closed form of E(N | X = x) in terms of F_DGE(x), F_DGE(x-1) and f_DGE(x).
inline double cond_n_mean_closed_form(const UgdgeParams& params, std::int64_t x) {
  const double c = 1 - params.theta();
  const double f1 = dge_cdf(params.base(), static_cast<double>(x));
  const double f0 = dge_cdf(params.base(), static_cast<double>(x - 1));
  const double pmf = dge_pmf(params.base(), x);
  const double d1 = 1 - c * f1;
  const double d0 = 1 - c * f0;
  return (f1 * d0 / d1 - f0 * d1 / d0) / pmf;
}

/// Law of the maximum of M ~ GM(q) i.i.d. copies.
inline UgdgeParams compound_geometric_params(const UgdgeParams& params, double q) {
  if (!(q > 0 && q <= 1)) throw DomainError("compound_geometric_params: q must lie in (0, 1)");
  return UgdgeParams(params.base(), q * params.theta());
}

}  // namespace gdge
