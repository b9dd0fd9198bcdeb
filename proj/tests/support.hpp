#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "gdge/numeric.hpp"

namespace testing_support {

/// Pearson test of integer draws against a pmf on 0..; cells with expected < 5 merge into a tail.
inline double chi2_pvalue_int(const std::vector<std::int64_t>& draws, const std::function<double(std::int64_t)>& pmf) {
  const double m = static_cast<double>(draws.size());
  std::map<std::int64_t, double> counts;
  for (auto d : draws) counts[d] += 1;
  double stat = 0, used_e = 0, used_o = 0;
  int cells = 0;
  std::int64_t x = 0;
  for (;; ++x) {
    const double e = m * pmf(x);
    if (e < 5) break;
    const double o = counts.count(x) ? counts[x] : 0.0;
    stat += (o - e) * (o - e) / e;
    used_e += e;
    used_o += o;
    ++cells;
  }
  const double tail_e = m - used_e, tail_o = m - used_o;
  if (tail_e > 1e-9) {
    stat += (tail_o - tail_e) * (tail_o - tail_e) / tail_e;
    ++cells;
  }
  return gdge::chi2_survival(stat, std::max(1, cells - 1));
}

/// Same for labelled cells: `probs[i]` for cell i plus an implicit remainder cell.
inline double chi2_pvalue_cells(const std::vector<double>& observed, const std::vector<double>& probs, double m) {
  double stat = 0, used_e = 0, used_o = 0;
  int cells = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double e = m * probs[i];
    if (e < 5) continue;
    stat += (observed[i] - e) * (observed[i] - e) / e;
    used_e += e;
    used_o += observed[i];
    ++cells;
  }
  const double tail_e = m - used_e, tail_o = m - used_o;
  if (tail_e > 1e-9) {
    stat += (tail_o - tail_e) * (tail_o - tail_e) / tail_e;
    ++cells;
  }
  return gdge::chi2_survival(stat, std::max(1, cells - 1));
}

/// sup_x |F_empirical(x) - cdf(x)| over the integer support of the draws.
inline double kolmogorov_int(std::vector<std::int64_t> draws, const std::function<double(std::int64_t)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double m = static_cast<double>(draws.size());
  double worst = 0;
  std::size_t i = 0;
  for (std::int64_t x = 0; x <= draws.back(); ++x) {
    while (i < draws.size() && draws[i] <= x) ++i;
    worst = std::max(worst, std::abs(static_cast<double>(i) / m - cdf(x)));
  }
  return worst;
}

}  // namespace testing_support
