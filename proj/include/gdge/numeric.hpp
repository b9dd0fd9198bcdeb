#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "gdge/errors.hpp"

namespace gdge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// ln(1 - e^{-a}) for a >= 0, accurate for both tiny and large a.
inline double log1mexp(double a) {
  if (a <= 0.0) return -kInf;
  return a <= std::numbers::ln2 ? std::log(-std::expm1(-a)) : std::log1p(-std::exp(-a));
}

/// ln(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

inline double logit(double q) { return std::log(q) - std::log1p(-q); }
inline double logistic(double t) {
  return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

struct Maximum {
  double x;
  double value;
};

/// Golden-section maximization of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than tol * (1 + |x|).
template <class F>
Maximum golden_section_max(F&& f, double lo, double hi, double tol, int max_iter = 500) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter && (hi - lo) > tol * (1.0 + std::abs(c)); ++i) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

/// Brent's method maximizing f on [lo, hi]. Precision is capped at about sqrt(eps) relative.
template <class F>
Maximum brent_max(F&& f, double lo, double hi, int max_iter = 200) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto [x, neg] = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi,
                                                              std::numeric_limits<double>::digits / 2, iters);
  return {x, -neg};
}

/// Upper tail P(chi2_k > x).
inline double chi2_survival(double x, double df) {
  if (!(df > 0)) throw DomainError("chi-square degrees of freedom must be positive");
  if (x <= 0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace gdge
