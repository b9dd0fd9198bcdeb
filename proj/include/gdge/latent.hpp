#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gdge/core_dge.hpp"
#include "gdge/errors.hpp"
#include "gdge/numeric.hpp"

namespace gdge {

inline constexpr std::int64_t kDefaultCountCap = 100000;

namespace detail {

/// One observed coordinate x under DGE(alpha, p): l1 = ln(1 - p^{x+1}), l0 = ln(1 - p^x).
struct LatentFactor {
  double alpha;
  double l1;
  double l0;

  static LatentFactor make(const DgeParams& params, std::int64_t x) {
    return {params.alpha(), log_one_minus_pow(params.log_p(), x), log_one_minus_pow(params.log_p(), x - 1)};
  }
};

/// Joint law of an observation and the latent geometric count N:
///   P(obs, N = n) = theta (1-theta)^{n-1} prod_k f_DGE(x_k; n alpha_k, p_k).
/// Every term is bounded by the envelope theta (1-theta)^{n-1} A^n with
/// A = prod_k F_DGE(x_k), a geometric sequence with ratio (1-theta) A < 1.
class LatentCountKernel {
 public:
  LatentCountKernel(double theta, const LatentFactor* factors, std::size_t count)
      : theta_(theta), count_(count) {
    for (std::size_t k = 0; k < count; ++k) factors_[k] = factors[k];
    log_theta_ = std::log(theta);
    log_c_ = theta < 1 ? std::log1p(-theta) : -kInf;
    log_a_ = 0.0;
    for (std::size_t k = 0; k < count_; ++k) log_a_ += factors_[k].alpha * factors_[k].l1;
  }

  double theta() const noexcept { return theta_; }

  double log_joint(double n) const {
    double v = log_theta_ + (n > 1 ? (n - 1) * log_c_ : 0.0);
    for (std::size_t k = 0; k < count_; ++k)
      v += log_pmf_from_logs(n * factors_[k].alpha, factors_[k].l1, factors_[k].l0);
    return v;
  }

  /// Upper bound on log_joint(n') for all n' >= n.
  double log_envelope(double n) const { return log_theta_ + (n - 1) * log_c_ + n * log_a_; }

  /// ln of the envelope ratio (1-theta) A.
  double log_rate() const { return log_c_ + log_a_; }

  /// Smallest n maximizing P(N = n | obs).
  std::int64_t argmax(std::int64_t cap) const {
    if (theta_ == 1.0) return 1;
    std::int64_t best_n = 1;
    double best = log_joint(1.0);
    for (std::int64_t n = 2;; ++n) {
      if (log_envelope(static_cast<double>(n)) < best) return best_n;
      if (n > cap) throw ResourceError("latent-count scan reached cap " + std::to_string(cap) + " without a certified maximum");
      const double v = log_joint(static_cast<double>(n));
      if (v > best) {
        best = v;
        best_n = n;
      }
    }
  }

  /// Normalized posterior weights P(N = n | obs) for n = 1..size(), truncated
  /// once the envelope bounds the remaining mass below rel_tol.
  /// `log_norm` receives ln P(obs) from the same summation.
  std::vector<double> posterior(double rel_tol, std::int64_t cap, double* log_norm = nullptr) const {
    std::vector<double> logs;
    if (theta_ == 1.0) {
      logs.push_back(log_joint(1.0));
    } else {
      const double log_rho = log_rate();
      const double log_tail_scale = -std::log(-std::expm1(log_rho));  // 1 / (1 - rho)
      const double log_tol = std::log(rel_tol);
      double acc = -kInf;
      for (std::int64_t n = 1;; ++n) {
        const double v = log_joint(static_cast<double>(n));
        logs.push_back(v);
        acc = log_add_exp(acc, v);
        const double tail = log_envelope(static_cast<double>(n + 1)) + log_tail_scale;
        if (tail < acc + log_tol) break;
        if (n >= cap) throw ResourceError("posterior of N exceeded cap " + std::to_string(cap));
      }
    }
    double acc = -kInf;
    for (double v : logs) acc = log_add_exp(acc, v);
    if (log_norm) *log_norm = acc;
    std::vector<double> w(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) w[i] = std::exp(logs[i] - acc);
    return w;
  }

  /// E(N | obs) by direct summation with an envelope tail bound below rel_tol.
  double mean(double rel_tol, std::int64_t cap) const {
    if (theta_ == 1.0) return 1.0;
    const double log_rho = log_rate();
    const double one_minus_rho = -std::expm1(log_rho);
    const double log_tol = std::log(rel_tol);
    double log_total = -kInf;
    double log_first = -kInf;
    for (std::int64_t n = 1;; ++n) {
      const double dn = static_cast<double>(n);
      const double v = log_joint(dn);
      log_total = log_add_exp(log_total, v);
      log_first = log_add_exp(log_first, std::log(dn) + v);
      // sum_{j>n} j env(j) <= env(n+1) [(n+1)/(1-rho) + rho/(1-rho)^2]
      const double tail = log_envelope(dn + 1) +
                          std::log((dn + 1) / one_minus_rho + std::exp(log_rho) / (one_minus_rho * one_minus_rho));
      if (tail < log_first + log_tol) break;
      if (n >= cap) throw ResourceError("E(N | obs) summation exceeded cap " + std::to_string(cap));
    }
    return std::exp(log_first - log_total);
  }

 private:
  double theta_;
  std::array<LatentFactor, 2> factors_{};
  std::size_t count_;
  double log_theta_;
  double log_c_;
  double log_a_;
};

}  // namespace detail
}  // namespace gdge
