#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gdge/core_dge.hpp"
#include "gdge/random.hpp"
#include "support.hpp"

using namespace gdge;

TEST(GeCdf, Origin) { EXPECT_EQ(ge_cdf(GeParams(1, 1), 0.0), 0.0); }

TEST(GeCdf, LimitIsOne) { EXPECT_DOUBLE_EQ(ge_cdf(GeParams(2, 1), 1e6), 1.0); }

TEST(GeCdf, HandValueAtLn2) { EXPECT_NEAR(ge_cdf(GeParams(2, 1), std::log(2.0)), 0.25, 1e-15); }

TEST(GeCdf, NegativeArgumentRejected) { EXPECT_THROW(ge_cdf(GeParams(1, 1), -0.1), DomainError); }

TEST(GeSample, LowerEndpoint) {
  const double v = ge_sample(GeParams(1, 1), 1e-300);
  EXPECT_GE(v, 0.0);
  EXPECT_LT(v, 1e-250);
}

TEST(GeSample, ExponentialIdentity) { EXPECT_NEAR(ge_sample(GeParams(1, 1), 1 - std::exp(-1.0)), 1.0, 1e-14); }

TEST(GeSample, RoundTripThroughCdf) {
  const GeParams g(3, 2);
  EXPECT_NEAR(ge_cdf(g, ge_sample(g, 0.5)), 0.5, 1e-12);
}

TEST(GeSample, UniformOutsideOpenIntervalRejected) {
  EXPECT_THROW(ge_sample(GeParams(1, 1), 0.0), DomainError);
  EXPECT_THROW(ge_sample(GeParams(1, 1), 1.0), DomainError);
}

TEST(Params, ValidatedOnConstruction) {
  EXPECT_THROW(GeParams(0, 1), DomainError);
  EXPECT_THROW(GeParams(1, -1), DomainError);
  EXPECT_THROW(DgeParams(-1, 0.5), DomainError);
  EXPECT_THROW(DgeParams(1, 0), DomainError);
  EXPECT_THROW(DgeParams(1, 1), DomainError);
}

TEST(DgePmf, GeometricCases) {
  const DgeParams g(1, 0.5);
  EXPECT_DOUBLE_EQ(dge_pmf(g, 0), 0.5);
  EXPECT_NEAR(dge_pmf(g, 2), 0.125, 1e-16);
}

TEST(DgePmf, HandValue) { EXPECT_NEAR(dge_pmf(DgeParams(2, 0.5), 1), 0.3125, 1e-15); }

TEST(DgePmf, NegativeRejected) { EXPECT_THROW(dge_pmf(DgeParams(2, 0.5), -1), DomainError); }

TEST(DgeCdf, Values) {
  EXPECT_EQ(dge_cdf(DgeParams(2, 0.5), -0.3), 0.0);
  EXPECT_DOUBLE_EQ(dge_cdf(DgeParams(1, 0.5), 0.0), 0.5);
  EXPECT_NEAR(dge_cdf(DgeParams(2, 0.5), 1.9), 0.5625, 1e-15);
}

TEST(DgeHazard, Values) {
  EXPECT_NEAR(dge_hazard(DgeParams(1, 0.5), 0), 0.5, 1e-15);
  EXPECT_NEAR(dge_hazard(DgeParams(1, 0.5), 5), 0.5, 1e-13);
  EXPECT_NEAR(dge_hazard(DgeParams(2, 0.5), 1), 0.3125 / 0.75, 1e-14);
}

TEST(DgeHazard, ZeroSurvivalRejected) { EXPECT_THROW(dge_hazard(DgeParams(1, 0.01), 400), DomainError); }

TEST(DgeSample, InverseTransformPoints) {
  EXPECT_EQ(dge_sample(DgeParams(1, 0.5), 0.49), 0);
  EXPECT_EQ(dge_sample(DgeParams(1, 0.5), 0.51), 1);
}

TEST(DgeSample, MatchesPmfByChiSquare) {
  const DgeParams d(2.5, 0.6);
  Engine g(20240601);
  std::vector<std::int64_t> draws(100000);
  for (auto& v : draws) v = dge_sample(d, g);
  EXPECT_GT(testing_support::chi2_pvalue_int(draws, [&](std::int64_t x) { return dge_pmf(d, x); }), 0.01);
}

TEST(DgeSample, FloorRepresentationKolmogorov) {
  const DgeParams d(0.7, 0.8);
  Engine g(77);
  std::vector<std::int64_t> draws(100000);
  for (auto& v : draws) v = dge_sample(d, g);
  EXPECT_LT(testing_support::kolmogorov_int(draws, [&](std::int64_t x) { return dge_cdf(d, static_cast<double>(x)); }),
            0.01);
}

class DgeGrid : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(DgeGrid, Normalization) {
  const DgeParams d(GetParam().first, GetParam().second);
  const double eps = 1e-10;
  double sum = 0;
  for (std::int64_t x = 0;; ++x) {
    sum += dge_pmf(d, x);
    if (1 - dge_cdf(d, static_cast<double>(x)) < eps) break;
  }
  EXPECT_GE(sum, 1 - eps);
}

TEST_P(DgeGrid, PmfIsCdfDifference) {
  const DgeParams d(GetParam().first, GetParam().second);
  for (std::int64_t x = 0; x <= 100; ++x) {
    const double diff = dge_cdf(d, static_cast<double>(x)) - dge_cdf(d, static_cast<double>(x - 1));
    EXPECT_NEAR(dge_pmf(d, x), diff, 1e-15 + 1e-12 * diff) << "x=" << x;
  }
}

INSTANTIATE_TEST_SUITE_P(Params, DgeGrid,
                         ::testing::Values(std::pair{0.3, 0.2}, std::pair{0.3, 0.9}, std::pair{1.0, 0.5},
                                           std::pair{2.0, 0.25}, std::pair{7.5, 0.6}, std::pair{40.0, 0.95}));

TEST(DgePmf, AlphaOneIsGeometric) {
  for (double p : {0.1, 0.5, 0.9}) {
    const DgeParams d(1, p);
    for (std::int64_t x = 0; x <= 50; ++x) {
      const double expect = (1 - p) * std::pow(p, static_cast<double>(x));
      EXPECT_NEAR(dge_pmf(d, x), expect, 1e-14 * std::max(1.0, expect)) << "p=" << p << " x=" << x;
    }
  }
}

TEST(DgePmf, TailPrecisionNearOne) {
  // p close to 1, far tail: the log1p route keeps relative accuracy
  const DgeParams d(2, 0.999);
  const double x = 20000;
  const double q1 = std::pow(0.999, x + 1), q0 = std::pow(0.999, x);
  const double expect = 2 * (q0 - q1) - (q0 * q0 - q1 * q1);  // (1-q1)^2 - (1-q0)^2
  EXPECT_NEAR(dge_pmf(d, 20000) / expect, 1.0, 1e-6);
}
