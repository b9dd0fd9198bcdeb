#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gdge/bgdge.hpp"
#include "gdge/dataset.hpp"
#include "gdge/em.hpp"
#include "gdge/errors.hpp"
#include "gdge/numeric.hpp"
#include "gdge/ugdge.hpp"

namespace gdge {

struct TestResult {
  std::string name;
  double statistic = 0;
  std::string reference;  ///< "chi2(2)" or "0.5+0.5chi2(1)"
  double p_value = 1;
  double ll_full = 0;
  double ll_null = 0;
  FitReport full;
  FitReport null_fit;
  std::vector<std::string> warnings;
};

/// Equality of the two marginals (alpha1 = alpha2, p1 = p2) against the free model, chi2 with 2 df.
inline TestResult test_equal_marginals(const BivDataset& data, const EmConfig& cfg = {},
                                       std::optional<BgdgeParams> init = std::nullopt) {
  data.validate();
  TestResult out;
  out.name = "equal_marginals";
  out.reference = "chi2(2)";
  if (data.size() < 5) out.warnings.push_back("fewer than 5 observations: asymptotic reference is unreliable");
  const BgdgeParams start = init ? *init : default_init_biv(data, cfg);
  out.full = em_fit_biv(data, start, cfg);
  const UgdgeParams null_start(0.5 * (start.m1().alpha() + start.m2().alpha()), 0.5 * (start.m1().p() + start.m2().p()),
                               start.theta());
  out.null_fit = em_fit_biv_equal(data, null_start, cfg);
  const double slack = 1e-8 * std::max(1.0, std::abs(out.full.loglik));
  if (out.null_fit.loglik > out.full.loglik + slack) {
    // the free model nests the null one; restart it from the constrained optimum
    out.warnings.push_back("null log-likelihood above full fit: full model refitted from the null estimates");
    FitReport again = em_fit_biv(data, biv_from_vector(out.null_fit.estimates), cfg);
    if (again.loglik > out.full.loglik) out.full = std::move(again);
  }
  out.ll_full = out.full.loglik;
  out.ll_null = out.null_fit.loglik;
  const double stat = 2 * (out.ll_full - out.ll_null);
  if (stat < -1e-8) out.warnings.push_back("null log-likelihood exceeds full log-likelihood beyond slack");
  out.statistic = std::max(stat, 0.0);
  out.p_value = chi2_survival(out.statistic, 2);
  return out;
}

/// theta = 1 (independent DGE marginals) against theta < 1; boundary reference 1/2 + 1/2 chi2(1).
inline TestResult test_independence(const BivDataset& data, const EmConfig& cfg = {},
                                    std::optional<BgdgeParams> init = std::nullopt) {
  data.validate();
  TestResult out;
  out.name = "independence";
  out.reference = "0.5+0.5chi2(1)";
  if (data.size() < 5) out.warnings.push_back("fewer than 5 observations: asymptotic reference is unreliable");
  out.full = em_fit_biv(data, init ? *init : default_init_biv(data, cfg), cfg);
  out.null_fit = fit_theta_one_biv(data, cfg);
  out.ll_full = out.full.loglik;
  out.ll_null = out.null_fit.loglik;
  const double stat = 2 * (out.ll_full - out.ll_null);
  if (stat < -1e-8) out.warnings.push_back("null log-likelihood exceeds full log-likelihood beyond slack");
  out.statistic = std::max(stat, 0.0);
  out.p_value = out.statistic <= 0 ? 1.0 : 0.5 * chi2_survival(out.statistic, 1);
  return out;
}

// ---------------------------------------------------------------------------
// Chi-square goodness of fit

struct GofCell {
  std::string label;
  double observed = 0;
  double expected = 0;
  bool pooled = false;
};

struct GofResult {
  std::vector<GofCell> cells;
  double statistic = 0;
  int df = 1;
  double p_value = 1;
};

struct GofOptions {
  double pool_min = 1.0;  ///< 0 disables pooling
  bool tail_cell = true;  ///< univariate: extra cell for x > max observed; bivariate: fold tails into edge cells
  std::optional<int> df_override;
};

namespace detail {

inline void merge_into(GofCell& dst, const GofCell& src, bool src_first) {
  dst.label = src_first ? src.label + "|" + dst.label : dst.label + "|" + src.label;
  dst.observed += src.observed;
  dst.expected += src.expected;
  dst.pooled = true;
}

/// Merges adjacent cells, starting at the tail, until every expected count reaches `pool_min`.
inline std::vector<GofCell> pool_cells(std::vector<GofCell> cells, double pool_min) {
  if (!(pool_min > 0)) return cells;
  for (std::size_t i = cells.size(); i-- > 1;) {
    if (cells[i].expected < pool_min) {
      merge_into(cells[i - 1], cells[i], false);
      cells.erase(cells.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  if (cells.size() > 1 && cells[0].expected < pool_min) {
    merge_into(cells[1], cells[0], true);
    cells.erase(cells.begin());
  }
  return cells;
}

inline GofResult finish_gof(std::vector<GofCell> cells, int n_params, const GofOptions& opt) {
  cells = pool_cells(std::move(cells), opt.pool_min);
  if (cells.size() < 2) throw EvaluationError("goodness of fit: fewer than 2 cells left after pooling");
  GofResult r;
  for (const GofCell& c : cells) {
    if (!(c.expected > 0)) throw EvaluationError("goodness of fit: cell " + c.label + " has zero expected count");
    const double d = c.observed - c.expected;
    r.statistic += d * d / c.expected;
  }
  r.cells = std::move(cells);
  r.df = opt.df_override ? *opt.df_override : std::max(1, static_cast<int>(r.cells.size()) - 1 - n_params);
  if (r.df < 1) throw DomainError("goodness of fit: df must be at least 1");
  r.p_value = chi2_survival(r.statistic, r.df);
  return r;
}

}  // namespace detail

/// Cells 0..max(x) with expected m*pmf(x), plus "max+" tail cell when `opt.tail_cell`.
inline GofResult gof_chisq_uni(const UniDataset& data, const UgdgeParams& fitted, int n_params = 3,
                               const GofOptions& opt = {}) {
  data.validate();
  const double m = static_cast<double>(data.size());
  const std::int64_t top = *std::max_element(data.values.begin(), data.values.end());
  std::vector<GofCell> cells;
  for (std::int64_t x = 0; x <= top; ++x) cells.push_back({std::to_string(x), 0, m * ugdge_pmf(fitted, x), false});
  for (const auto& [x, c] : data.counts()) cells[static_cast<std::size_t>(x)].observed = static_cast<double>(c);
  if (opt.tail_cell) cells.push_back({std::to_string(top + 1) + "+", 0, m * (1 - ugdge_cdf(fitted, static_cast<double>(top))), false});
  return detail::finish_gof(std::move(cells), n_params, opt);
}

/// Rectangle 0..max(x) by 0..max(y) in row-major order; with `opt.tail_cell` the last row and
/// column absorb the mass beyond the observed maxima so expected counts sum to m.
inline GofResult gof_chisq_biv(const BivDataset& data, const BgdgeParams& fitted, const GofOptions& opt = {}) {
  data.validate();
  const double m = static_cast<double>(data.size());
  std::int64_t xmax = 0, ymax = 0;
  for (const BivCell& c : data.pairs) {
    xmax = std::max(xmax, c.x);
    ymax = std::max(ymax, c.y);
  }
  auto cdf = [&](std::int64_t x, std::int64_t y, bool open_x, bool open_y) {
    if (x < 0 || y < 0) return 0.0;
    const double xs = open_x ? kInf : static_cast<double>(x);
    const double ys = open_y ? kInf : static_cast<double>(y);
    return bgdge_cdf(fitted, xs, ys);
  };
  std::vector<GofCell> cells;
  for (std::int64_t x = 0; x <= xmax; ++x) {
    for (std::int64_t y = 0; y <= ymax; ++y) {
      double e;
      if (opt.tail_cell) {
        const bool ox = x == xmax, oy = y == ymax;
        e = cdf(x, y, ox, oy) - cdf(x - 1, y, false, oy) - cdf(x, y - 1, ox, false) + cdf(x - 1, y - 1, false, false);
      } else {
        e = bgdge_pmf(fitted, {x, y});
      }
      cells.push_back({"(" + std::to_string(x) + "," + std::to_string(y) + ")", 0, m * e, false});
    }
  }
  for (const auto& [cell, c] : data.contingency())
    cells[static_cast<std::size_t>(cell.x * (ymax + 1) + cell.y)].observed = static_cast<double>(c);
  return detail::finish_gof(std::move(cells), 5, opt);
}

}  // namespace gdge
