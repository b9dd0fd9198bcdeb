#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

#include "gdge/bgdge.hpp"
#include "gdge/errors.hpp"
#include "gdge/ugdge.hpp"

namespace gdge {

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace detail

/// CSV rows `x,pmf,cdf` for x = 0..horizon.
inline void write_uni_table(std::ostream& out, const UgdgeParams& params, std::int64_t horizon) {
  if (horizon < 0) throw DomainError("table horizon must be nonnegative");
  out << "x,pmf,cdf\n";
  for (std::int64_t x = 0; x <= horizon; ++x)
    out << x << ',' << detail::num(ugdge_pmf(params, x)) << ',' << detail::num(ugdge_cdf(params, static_cast<double>(x)))
        << '\n';
}

/// CSV rows `x,y,pmf,cdf` over the box [0, hx] x [0, hy].
inline void write_biv_table(std::ostream& out, const BgdgeParams& params, std::int64_t hx, std::int64_t hy) {
  if (hx < 0 || hy < 0) throw DomainError("table horizon must be nonnegative");
  out << "x,y,pmf,cdf\n";
  for (std::int64_t x = 0; x <= hx; ++x)
    for (std::int64_t y = 0; y <= hy; ++y)
      out << x << ',' << y << ',' << detail::num(bgdge_pmf(params, {x, y})) << ','
          << detail::num(bgdge_cdf(params, static_cast<double>(x), static_cast<double>(y))) << '\n';
}

}  // namespace gdge
