#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gdge/core_dge.hpp"
#include "gdge/errors.hpp"
#include "gdge/numeric.hpp"

namespace gdge {

/// One term of the M-step objective: `weight` copies of ln f_DGE(value; mult * alpha, p).
/// `mult` is the (imputed or posterior-enumerated) latent count.
struct WeightedObs {
  std::int64_t value = 0;
  double mult = 1.0;
  double weight = 1.0;
};

/// Sorts by (value, mult) and merges duplicates. Terms at value 0 are linear in `mult`
/// (ln f = mult * alpha * ln(1 - p)), so they collapse exactly into one term at the mean count.
inline std::vector<WeightedObs> consolidate(std::vector<WeightedObs> obs) {
  std::sort(obs.begin(), obs.end(), [](const WeightedObs& a, const WeightedObs& b) {
    return a.value != b.value ? a.value < b.value : a.mult < b.mult;
  });
  std::vector<WeightedObs> out;
  out.reserve(obs.size());
  double zero_weight = 0, zero_count = 0;
  for (const WeightedObs& o : obs) {
    if (o.weight <= 0) continue;
    if (o.value == 0) {
      zero_weight += o.weight;
      zero_count += o.weight * o.mult;
    } else if (!out.empty() && out.back().value == o.value && out.back().mult == o.mult) {
      out.back().weight += o.weight;
    } else {
      out.push_back(o);
    }
  }
  if (zero_weight > 0) out.insert(out.begin(), WeightedObs{0, zero_count / zero_weight, zero_weight});
  return out;
}

enum class AlphaSearch { Newton, Golden };

inline constexpr double kAlphaMin = 1e-8;
inline constexpr double kAlphaMax = 1e6;
inline constexpr double kProbEdge = 1e-6;

struct AlphaProfile {
  double alpha;
  double value;
  bool boundary;  ///< maximizer pinned at kAlphaMin or kAlphaMax
};

struct PairFit {
  double alpha;
  double p;
  double value;
  bool boundary;  ///< alpha or p pinned at the edge of its search range
};

namespace detail {

/// g(alpha) = sum_j w_j ln f_DGE(x_j; n_j alpha, p) at a fixed p, with its
/// first two derivatives. Each term is concave in alpha.
class AlphaObjective {
 public:
  AlphaObjective(double p, std::span<const WeightedObs> obs) {
    if (!(p > 0 && p < 1)) throw DomainError("profile: p must lie in (0, 1)");
    const double log_p = std::log(p);
    terms_.reserve(obs.size());
    std::int64_t last = -1;
    double l1 = 0, d = 0;
    for (const WeightedObs& o : obs) {
      if (o.value < 0) throw DomainError("profile: observations must be nonnegative");
      if (!(o.mult >= 1)) throw DomainError("profile: latent counts must be at least 1");
      if (o.value != last) {
        l1 = log_one_minus_pow(log_p, o.value);
        d = o.value == 0 ? kInf : l1 - log_one_minus_pow(log_p, o.value - 1);
        last = o.value;
      }
      terms_.push_back({o.weight, o.mult, l1, d});
    }
  }

  double value(double alpha) const {
    double s = 0;
    for (const Term& t : terms_) {
      const double shape = t.mult * alpha;
      s += t.weight * (t.d == kInf ? shape * t.l1 : shape * t.l1 + log1mexp(shape * t.d));
    }
    return s;
  }

  /// First and second derivative in alpha.
  std::pair<double, double> derivatives(double alpha) const {
    double g1 = 0, g2 = 0;
    for (const Term& t : terms_) {
      if (t.d == kInf) {
        g1 += t.weight * t.mult * t.l1;
        continue;
      }
      const double sd = t.mult * alpha * t.d;
      const double r = t.d / std::expm1(sd);
      g1 += t.weight * t.mult * (t.l1 + r);
      g2 -= t.weight * t.mult * t.mult * r * t.d / (-std::expm1(-sd));
    }
    return {g1, g2};
  }

 private:
  struct Term {
    double weight;
    double mult;
    double l1;
    double d;  // l1 - l0, +inf at value 0
  };
  std::vector<Term> terms_;
};

inline AlphaProfile maximize_alpha_newton(const AlphaObjective& g, double start, double tol) {
  double lo, hi;
  double a = std::clamp(start, kAlphaMin, kAlphaMax);
  auto slope = [&](double x) { return g.derivatives(x).first; };
  if (slope(a) > 0) {
    lo = a;
    hi = a;
    do {
      lo = hi;
      hi = hi * 2;
      if (hi >= kAlphaMax) return {kAlphaMax, g.value(kAlphaMax), slope(kAlphaMax) > 0};
    } while (slope(hi) > 0);
  } else {
    hi = a;
    lo = a;
    do {
      hi = lo;
      lo = lo / 2;
      if (lo <= kAlphaMin) {
        if (slope(kAlphaMin) <= 0) return {kAlphaMin, g.value(kAlphaMin), true};
        lo = kAlphaMin;
        break;
      }
    } while (slope(lo) <= 0);
  }
  // g' is decreasing on [lo, hi] with g'(lo) > 0 >= g'(hi): safeguarded Newton.
  a = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const auto [d1, d2] = g.derivatives(a);
    if (d1 > 0) lo = a; else hi = a;
    double next = d2 < 0 ? a - d1 / d2 : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - a);
    a = next;
    if (step <= tol * a || hi - lo <= tol * a) break;
  }
  return {a, g.value(a), false};
}

inline AlphaProfile maximize_alpha_golden(const AlphaObjective& g, double start, double tol) {
  double a = std::clamp(start, kAlphaMin, kAlphaMax);
  double fa = g.value(a);
  double lo = a, hi = a;
  // expand upward by doubling while the function rises, else downward by halving
  double up = std::min(2 * a, kAlphaMax);
  double fup = g.value(up);
  if (fup > fa) {
    lo = a;
    double mid = up, fmid = fup;
    for (;;) {
      const double next = std::min(2 * mid, kAlphaMax);
      const double fnext = g.value(next);
      if (fnext <= fmid) { hi = next; break; }
      if (next >= kAlphaMax) return {kAlphaMax, fnext, true};
      lo = mid;
      mid = next;
      fmid = fnext;
    }
  } else {
    hi = up;
    double mid = a, fmid = fa;
    for (;;) {
      const double next = mid / 2;
      if (next <= kAlphaMin) {
        const double fmin = g.value(kAlphaMin);
        if (fmin >= fmid) return {kAlphaMin, fmin, true};
        lo = kAlphaMin;
        break;
      }
      const double fnext = g.value(next);
      if (fnext < fmid) { lo = next; break; }
      hi = mid;
      mid = next;
      fmid = fnext;
    }
  }
  const Maximum m = golden_section_max([&](double x) { return g.value(x); }, lo, hi, tol);
  return {m.x, m.value, false};
}

}  // namespace detail

/// Maximizes alpha -> sum_j w_j ln[(1 - p^{x_j+1})^{n_j alpha} - (1 - p^{x_j})^{n_j alpha}]
/// at fixed p. The objective is concave in alpha, so the bracketed search finds the
/// global maximum; `boundary` is set when the supremum is approached at an edge
/// (e.g. all observations are zero, where the objective decreases monotonically).
inline AlphaProfile profile_alpha_max(double p, std::span<const WeightedObs> obs, double inner_tol,
                                      AlphaSearch search = AlphaSearch::Newton, double start = 1.0) {
  if (obs.empty()) throw DomainError("profile_alpha_max: no observations");
  const detail::AlphaObjective g(p, obs);
  return search == AlphaSearch::Newton ? detail::maximize_alpha_newton(g, start, inner_tol)
                                       : detail::maximize_alpha_golden(g, start, inner_tol);
}

/// The M-step objective g(alpha, p).
inline double pair_objective(double alpha, double p, std::span<const WeightedObs> obs) {
  return detail::AlphaObjective(p, obs).value(alpha);
}

struct PairSearch {
  int p_grid = 64;
  double inner_tol = 1e-8;
  AlphaSearch alpha_search = AlphaSearch::Newton;
};

/// Joint maximizer of g(alpha, p) by profiling: alpha is solved exactly for each p,
/// p is seeded on a grid (or locally around `hint`) and refined by Brent's method.
inline PairFit m_step_pair(std::span<const WeightedObs> obs, const PairSearch& cfg,
                           std::optional<DgeParams> hint = std::nullopt) {
  if (obs.empty()) throw DomainError("m_step_pair: no observations");
  double alpha_start = hint ? hint->alpha() : 1.0;
  auto profile = [&](double p) {
    const AlphaProfile a = profile_alpha_max(p, obs, cfg.inner_tol, cfg.alpha_search, alpha_start);
    return a;
  };
  auto refine = [&](double lo, double hi) {
    const Maximum m = brent_max([&](double p) { return profile(p).value; }, lo, hi);
    return m.x;
  };
  auto finish = [&](double p, bool at_edge) {
    const AlphaProfile a = profile(p);
    return PairFit{a.alpha, p, a.value, a.boundary || at_edge};
  };
  const double p_lo = kProbEdge, p_hi = 1 - kProbEdge;

  if (hint) {
    const double h = 1.0 / std::max(cfg.p_grid, 2);
    const double lo = std::max(p_lo, hint->p() - h);
    const double hi = std::min(p_hi, hint->p() + h);
    const double p = refine(lo, hi);
    const double edge_tol = 1e-6 * (hi - lo);
    const bool interior = (p - lo > edge_tol || lo == p_lo) && (hi - p > edge_tol || hi == p_hi);
    if (interior) return finish(p, p - p_lo < 1e-6 || p_hi - p < 1e-6);
  }

  const int n = std::max(cfg.p_grid, 3);
  std::vector<double> grid(n);
  int best = 0;
  double best_value = -kInf;
  for (int i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i + 1) / (n + 1);
    const AlphaProfile a = profile(grid[i]);
    if (a.value > best_value) {
      best_value = a.value;
      best = i;
      alpha_start = a.alpha;
    }
  }
  const double lo = best == 0 ? p_lo : grid[best - 1];
  const double hi = best == n - 1 ? p_hi : grid[best + 1];
  const double p = refine(lo, hi);
  return finish(p, p - p_lo < 1e-6 || p_hi - p < 1e-6);
}

}  // namespace gdge
