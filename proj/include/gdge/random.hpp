#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "gdge/errors.hpp"

namespace gdge {

/// The generator used throughout; callers own its state.
using Engine = std::mt19937_64;

/// Uniform variate on the open interval (0, 1) from the top 53 bits.
template <class Urbg>
double uniform_open01(Urbg& g) {
  static_assert(Urbg::max() - Urbg::min() == UINT64_MAX, "needs a 64-bit generator");
  return (static_cast<double>((g() - Urbg::min()) >> 11) + 0.5) * 0x1.0p-53;
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream seed for replication `rep` at sample size `n`; independent of scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n, std::uint64_t rep) {
  return mix64(mix64(mix64(master) ^ n) ^ (rep + 0x632be59bd9b4e019ULL));
}

/// N ~ GM(theta) on {1, 2, ...} by inversion.
inline std::int64_t geometric_from_uniform(double theta, double u) {
  if (!(theta > 0 && theta <= 1)) throw DomainError("geometric parameter must lie in (0, 1]");
  if (theta == 1.0) return 1;
  const double k = std::floor(std::log(u) / std::log1p(-theta));
  return 1 + static_cast<std::int64_t>(k);
}

template <class Urbg>
std::int64_t sample_geometric(double theta, Urbg& g) {
  return geometric_from_uniform(theta, uniform_open01(g));
}

}  // namespace gdge
