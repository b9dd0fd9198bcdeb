#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gdge/errors.hpp"
#include "gdge/numeric.hpp"
#include "gdge/random.hpp"

namespace gdge {

/// Shape/rate pair of the continuous generalized exponential law,
/// F(x) = (1 - e^{-lambda x})^alpha.
class GeParams {
 public:
  GeParams(double alpha, double lambda) : alpha_(alpha), lambda_(lambda) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("GE shape alpha must be positive");
    if (!(lambda > 0) || !std::isfinite(lambda)) throw DomainError("GE rate lambda must be positive");
  }
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

 private:
  double alpha_;
  double lambda_;
};

/// Shape/probability pair of the discrete generalized exponential law,
/// F(x) = (1 - p^{[x]+1})^alpha for x >= 0.
class DgeParams {
 public:
  DgeParams(double alpha, double p) : alpha_(alpha), p_(p) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw DomainError("DGE shape alpha must be positive");
    if (!(p > 0 && p < 1)) throw DomainError("DGE probability p must lie in (0, 1)");
    log_p_ = std::log(p);
  }
  double alpha() const noexcept { return alpha_; }
  double p() const noexcept { return p_; }
  double log_p() const noexcept { return log_p_; }
  /// Rate of the continuous GE law whose floor this is.
  double lambda() const noexcept { return -log_p_; }

  friend bool operator==(const DgeParams& a, const DgeParams& b) noexcept {
    return a.alpha_ == b.alpha_ && a.p_ == b.p_;
  }

 private:
  double alpha_;
  double p_;
  double log_p_;
};

namespace detail {

/// ln(1 - p^{x+1}) given ln p; -inf for x < 0 so that F(-1) = 0.
inline double log_one_minus_pow(double log_p, std::int64_t x) {
  if (x < 0) return -kInf;
  return std::log1p(-std::exp(static_cast<double>(x + 1) * log_p));
}

/// ln of (1 - p^{x+1})^s - (1 - p^x)^s, the DGE pmf with shape s, from the two
/// base logs l1 = ln(1 - p^{x+1}) and l0 = ln(1 - p^x).
inline double log_pmf_from_logs(double shape, double l1, double l0) {
  if (l0 == -kInf) return shape * l1;
  return shape * l1 + log1mexp(shape * (l1 - l0));
}

inline double log_dge_pmf_shape(double shape, double log_p, std::int64_t x) {
  return log_pmf_from_logs(shape, log_one_minus_pow(log_p, x), log_one_minus_pow(log_p, x - 1));
}

}  // namespace detail

inline double ge_cdf(const GeParams& params, double x) {
  if (x < 0 || std::isnan(x)) throw DomainError("ge_cdf: x must be nonnegative");
  if (x == 0) return 0.0;
  return std::exp(params.alpha() * std::log1p(-std::exp(-params.lambda() * x)));
}

/// Inverse-transform draw: the point where ge_cdf equals u.
inline double ge_sample(const GeParams& params, double u) {
  if (!(u > 0 && u < 1)) throw DomainError("ge_sample: u must lie in (0, 1)");
  // 1 - u^{1/alpha} = -expm1(ln u / alpha) keeps precision for large alpha.
  return -std::log(-std::expm1(std::log(u) / params.alpha())) / params.lambda();
}

template <class Urbg>
double ge_sample(const GeParams& params, Urbg& g) {
  return ge_sample(params, uniform_open01(g));
}

/// ln F_DGE(x); -inf for x < 0.
inline double dge_log_cdf(const DgeParams& params, double x) {
  if (x < 0 || std::isnan(x)) return -kInf;
  if (std::isinf(x)) return 0.0;
  return params.alpha() * detail::log_one_minus_pow(params.log_p(), static_cast<std::int64_t>(std::floor(x)));
}

inline double dge_cdf(const DgeParams& params, double x) { return std::exp(dge_log_cdf(params, x)); }

inline double dge_log_pmf(const DgeParams& params, std::int64_t x) {
  if (x < 0) throw DomainError("dge_pmf: x must be nonnegative, got " + std::to_string(x));
  return detail::log_dge_pmf_shape(params.alpha(), params.log_p(), x);
}

inline double dge_pmf(const DgeParams& params, std::int64_t x) { return std::exp(dge_log_pmf(params, x)); }

/// P(X = x) / P(X >= x).
inline double dge_hazard(const DgeParams& params, std::int64_t x) {
  if (x < 0) throw DomainError("dge_hazard: x must be nonnegative");
  // survival P(X >= x) = 1 - F(x - 1)
  const double log_surv = x == 0 ? 0.0 : log1mexp(-dge_log_cdf(params, static_cast<double>(x - 1)));
  if (log_surv == -kInf) throw DomainError("dge_hazard: survival underflows at x = " + std::to_string(x));
  return std::exp(dge_log_pmf(params, x) - log_surv);
}

inline std::int64_t dge_sample(const DgeParams& params, double u) {
  return static_cast<std::int64_t>(std::floor(ge_sample(GeParams(params.alpha(), params.lambda()), u)));
}

template <class Urbg>
std::int64_t dge_sample(const DgeParams& params, Urbg& g) {
  return dge_sample(params, uniform_open01(g));
}

}  // namespace gdge
