#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gdge/bgdge.hpp"
#include "gdge/errors.hpp"

namespace gdge {

/// Observed nonnegative counts, in input order.
struct UniDataset {
  std::vector<std::int64_t> values;

  std::size_t size() const noexcept { return values.size(); }

  void validate() const {
    if (values.empty()) throw DomainError("dataset is empty");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] < 0) throw DomainError("negative observation at index " + std::to_string(i));
  }

  /// Distinct values with multiplicities, ascending.
  std::vector<std::pair<std::int64_t, std::int64_t>> counts() const {
    std::vector<std::int64_t> v = values;
    std::sort(v.begin(), v.end());
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (std::int64_t x : v) {
      if (!out.empty() && out.back().first == x) ++out.back().second;
      else out.emplace_back(x, 1);
    }
    return out;
  }

  friend bool operator==(const UniDataset&, const UniDataset&) = default;
};

/// Observed pairs, in input order.
struct BivDataset {
  std::vector<BivCell> pairs;

  std::size_t size() const noexcept { return pairs.size(); }

  void validate() const {
    if (pairs.empty()) throw DomainError("dataset is empty");
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (pairs[i].x < 0 || pairs[i].y < 0) throw DomainError("negative observation at index " + std::to_string(i));
  }

  /// Contingency view: distinct cells with multiplicities, in (x, y) order.
  std::vector<std::pair<BivCell, std::int64_t>> contingency() const {
    std::vector<BivCell> v = pairs;
    std::sort(v.begin(), v.end());
    std::vector<std::pair<BivCell, std::int64_t>> out;
    for (const BivCell& c : v) {
      if (!out.empty() && out.back().first == c) ++out.back().second;
      else out.emplace_back(c, 1);
    }
    return out;
  }

  UniDataset column(Axis which) const {
    UniDataset out;
    out.values.reserve(pairs.size());
    for (const BivCell& c : pairs) out.values.push_back(which == Axis::X ? c.x : c.y);
    return out;
  }

  friend bool operator==(const BivDataset&, const BivDataset&) = default;
};

}  // namespace gdge
