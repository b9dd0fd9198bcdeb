#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gdge/bgdge.hpp"
#include "gdge/random.hpp"
#include "support.hpp"

using namespace gdge;

namespace {

double rect(const BgdgeParams& b, std::int64_t x, std::int64_t y) {
  auto F = [&](std::int64_t a, std::int64_t c) { return bgdge_cdf(b, static_cast<double>(a), static_cast<double>(c)); };
  return F(x, y) - F(x - 1, y) - F(x, y - 1) + F(x - 1, y - 1);
}

std::vector<BgdgeParams> grid() {
  return {BgdgeParams(1, 0.5, 1, 0.5, 0.5), BgdgeParams(2, 0.25, 2, 0.25, 0.25), BgdgeParams(0.4, 0.7, 3.5, 0.3, 0.05),
          BgdgeParams(4.55, 0.257, 8.39, 0.225, 0.9211), BgdgeParams(1.5, 0.6, 0.8, 0.45, 1.0)};
}

}  // namespace

TEST(BgdgeCdf, IndependenceAtThetaOne) {
  const BgdgeParams b(1.7, 0.4, 2.3, 0.6, 1.0);
  for (double x = 0; x < 8; ++x)
    for (double y = 0; y < 8; ++y)
      EXPECT_NEAR(bgdge_cdf(b, x, y), dge_cdf(b.m1(), x) * dge_cdf(b.m2(), y), 1e-15);
}

TEST(BgdgeCdf, MarginalLimit) {
  const BgdgeParams b(1.7, 0.4, 2.3, 0.6, 0.3);
  for (double y = 0; y < 8; ++y)
    EXPECT_NEAR(bgdge_cdf(b, kInf, y), ugdge_cdf(marginal_params(b, Axis::Y), y), 1e-15);
}

TEST(BgdgeCdf, HandValue) { EXPECT_NEAR(bgdge_cdf(BgdgeParams(1, 0.5, 1, 0.5, 0.5), 0, 0), 1.0 / 7, 1e-15); }

TEST(BgdgeCdf, NegativeCoordinateIsZero) {
  EXPECT_EQ(bgdge_cdf(BgdgeParams(1, 0.5, 1, 0.5, 0.5), -1, 3), 0.0);
  EXPECT_EQ(bgdge_cdf(BgdgeParams(1, 0.5, 1, 0.5, 0.5), 3, -0.2), 0.0);
}

TEST(GFunc, Values) {
  const BgdgeParams b(1.2, 0.35, 0.9, 0.55, 0.4);
  EXPECT_EQ(g_func(b, 3, -1), 0.0);
  const BgdgeParams one(1.2, 0.35, 0.9, 0.55, 1.0);
  for (std::int64_t x = 0; x < 6; ++x)
    for (std::int64_t y = 0; y < 6; ++y)
      EXPECT_NEAR(g_func(one, x, y), dge_cdf(one.m2(), static_cast<double>(y)) * dge_pmf(one.m1(), x), 1e-15);
}

TEST(BgdgePmf, RectangleIdentityAllRoutes) {
  for (const BgdgeParams& b : grid()) {
    for (std::int64_t x = 0; x <= 50; ++x)
      for (std::int64_t y = 0; y <= 50; ++y) {
        const double r = rect(b, x, y);
        EXPECT_NEAR(bgdge_pmf(b, {x, y}), r, 1e-12);
        EXPECT_NEAR(bgdge_pmf_g_difference(b, {x, y}), r, 1e-12);
      }
  }
}

TEST(BgdgePmf, IndependenceAtThetaOne) {
  const BgdgeParams b(1.5, 0.6, 0.8, 0.45, 1.0);
  for (std::int64_t x = 0; x < 30; ++x)
    for (std::int64_t y = 0; y < 30; ++y) {
      const double prod = dge_pmf(b.m1(), x) * dge_pmf(b.m2(), y);
      EXPECT_NEAR(bgdge_pmf(b, {x, y}), prod, 1e-14 * std::max(prod, 1e-300) + 1e-300);
    }
}

TEST(BgdgePmf, SerieACellZeroZero) {
  const BgdgeParams b(4.5519, 0.2570, 8.3892, 0.2250, 0.9211);
  EXPECT_NEAR(bgdge_pmf(b, {0, 0}), 0.64 / 26, 0.001);
}

TEST(BgdgePmf, SumsToOneAndMarginalizes) {
  for (const BgdgeParams& b : grid()) {
    std::vector<double> rows(201, 0.0), cols(201, 0.0);
    double total = 0;
    for (std::int64_t x = 0; x <= 200; ++x)
      for (std::int64_t y = 0; y <= 200; ++y) {
        const double v = bgdge_pmf(b, {x, y});
        rows[static_cast<std::size_t>(x)] += v;
        cols[static_cast<std::size_t>(y)] += v;
        total += v;
      }
    EXPECT_GE(total, 1 - 1e-8);
    for (std::int64_t k = 0; k <= 40; ++k) {
      EXPECT_NEAR(rows[static_cast<std::size_t>(k)], ugdge_pmf(marginal_params(b, Axis::X), k), 1e-8);
      EXPECT_NEAR(cols[static_cast<std::size_t>(k)], ugdge_pmf(marginal_params(b, Axis::Y), k), 1e-8);
    }
  }
}

TEST(BgdgePmf, NegativeCellRejected) {
  EXPECT_THROW(bgdge_pmf(BgdgeParams(1, 0.5, 1, 0.5, 0.5), {-1, 0}), DomainError);
}

TEST(BgdgeDependence, PositiveQuadrant) {
  for (const BgdgeParams& b : grid()) {
    if (b.theta() == 1.0) continue;
    for (double x = 0; x < 15; ++x)
      for (double y = 0; y < 15; ++y)
        EXPECT_GE(bgdge_cdf(b, x, y),
                  ugdge_cdf(marginal_params(b, Axis::X), x) * ugdge_cdf(marginal_params(b, Axis::Y), y) - 1e-15);
  }
}

TEST(Marginal, Parameters) {
  const BgdgeParams b(4.5519, 0.2570, 8.3892, 0.2250, 0.9211);
  const UgdgeParams m = marginal_params(b, Axis::X);
  EXPECT_EQ(m.alpha(), 4.5519);
  EXPECT_EQ(m.p(), 0.2570);
  EXPECT_EQ(m.theta(), 0.9211);
  const UgdgeParams one = marginal_params(BgdgeParams(2, 0.3, 1, 0.4, 1.0), Axis::Y);
  for (std::int64_t y = 0; y < 10; ++y) EXPECT_NEAR(ugdge_pmf(one, y), dge_pmf(DgeParams(1, 0.4), y), 1e-15);
}

TEST(CondGivenLe, Properties) {
  const BgdgeParams one(1.3, 0.4, 2.0, 0.6, 1.0);
  EXPECT_EQ(cond_given_le(one, 3).theta(), 1.0);
  const BgdgeParams b(1.3, 0.4, 2.0, 0.6, 0.35);
  EXPECT_NEAR(cond_given_le(b, 2000).theta(), 0.35, 1e-12);
  for (std::int64_t y = 0; y < 12; ++y) {
    const UgdgeParams c = cond_given_le(b, y);
    const double fy = ugdge_cdf(marginal_params(b, Axis::Y), static_cast<double>(y));
    for (double x = 0; x < 12; ++x) EXPECT_NEAR(bgdge_cdf(b, x, static_cast<double>(y)) / fy, ugdge_cdf(c, x), 1e-12);
  }
}

TEST(MaxParams, Properties) {
  const UgdgeParams m = max_params(BgdgeParams(1, 0.5, 1, 0.5, 1.0));
  for (double x = 0; x < 10; ++x) EXPECT_NEAR(ugdge_cdf(m, x), std::pow(1 - std::pow(0.5, x + 1), 2), 1e-15);
  EXPECT_THROW(max_params(BgdgeParams(1, 0.5, 1, 0.6, 1.0)), DomainError);
  const BgdgeParams b(0.7, 0.45, 2.2, 0.45, 0.3);
  for (double x = 0; x < 30; ++x) EXPECT_NEAR(ugdge_cdf(max_params(b), x), bgdge_cdf(b, x, x), 1e-12);
  Engine g(8);
  std::vector<std::int64_t> draws(100000);
  for (auto& v : draws) {
    const BivCell c = bgdge_sample(b, g);
    v = std::max(c.x, c.y);
  }
  EXPECT_LT(
      testing_support::kolmogorov_int(draws, [&](std::int64_t x) { return ugdge_cdf(max_params(b), static_cast<double>(x)); }),
      0.01);
}

TEST(CondCdfGivenEq, Properties) {
  const BgdgeParams one(1.3, 0.4, 2.0, 0.6, 1.0);
  for (double x = 0; x < 10; ++x) EXPECT_NEAR(cond_cdf_given_eq(one, x, 2), dge_cdf(one.m1(), x), 1e-14);
  const BgdgeParams b(1.3, 0.4, 2.0, 0.6, 0.2);
  EXPECT_NEAR(cond_cdf_given_eq(b, 1e6, 3), 1.0, 1e-12);
  for (std::int64_t y = 0; y < 8; ++y) {
    double col = 0;
    for (std::int64_t x = 0; x <= 400; ++x) col += bgdge_pmf(b, {x, y});
    double acc = 0;
    for (std::int64_t x = 0; x < 15; ++x) {
      acc += bgdge_pmf(b, {x, y});
      EXPECT_NEAR(cond_cdf_given_eq(b, static_cast<double>(x), y), acc / col, 1e-10);
    }
  }
}

TEST(BivCondN, ThetaOneDegenerate) {
  const BgdgeParams b(1.3, 0.4, 2.0, 0.6, 1.0);
  EXPECT_NEAR(biv_cond_n_pmf(b, {2, 3}, 1), 1.0, 1e-15);
  EXPECT_EQ(biv_cond_n_argmax(b, {2, 3}), 1);
  EXPECT_EQ(biv_cond_n_mean(b, {2, 3}, 1e-12), 1.0);
}

TEST(BivCondN, NormalizationAndMeans) {
  for (const BgdgeParams& b : grid()) {
    for (BivCell c : {BivCell{0, 0}, BivCell{1, 1}, BivCell{3, 0}, BivCell{2, 5}}) {
      double s = 0, first = 0;
      for (std::int64_t n = 1; n <= 20000; ++n) {
        const double w = biv_cond_n_pmf(b, c, n);
        s += w;
        first += static_cast<double>(n) * w;
      }
      EXPECT_NEAR(s, 1.0, 1e-10);
      EXPECT_NEAR(biv_cond_n_mean(b, c, 1e-14), first, 1e-9 * first);
      EXPECT_NEAR(biv_cond_n_mean_closed_form(b, c), first, 1e-7 * first);
    }
  }
}

TEST(BivCondN, ArgmaxMatchesScan) {
  const BgdgeParams b(4.5519, 0.2570, 8.3892, 0.2250, 0.9211);
  for (BivCell c : {BivCell{1, 1}, BivCell{0, 0}, BivCell{3, 3}}) {
    std::int64_t best_n = 1;
    double best = -1;
    for (std::int64_t n = 1; n <= 10000; ++n) {
      const double v = biv_cond_n_pmf(b, c, n);
      if (v > best) {
        best = v;
        best_n = n;
      }
    }
    EXPECT_EQ(biv_cond_n_argmax(b, c), best_n);
  }
  EXPECT_EQ(biv_cond_n_argmax(b, {1, 1}), 1);
}

TEST(BgdgeSample, ThetaOneCoordinatesAreDge) {
  const BgdgeParams b(1.3, 0.4, 2.0, 0.6, 1.0);
  Engine a(3), c(3);
  for (int i = 0; i < 500; ++i) {
    const BivCell s = bgdge_sample(b, a);
    (void)uniform_open01(c);
    EXPECT_EQ(s.x, dge_sample(b.m1(), c));
    EXPECT_EQ(s.y, dge_sample(b.m2(), c));
  }
}

TEST(BgdgeSample, FixedSeedRegression) {
  const BgdgeParams b(2, 0.25, 2, 0.25, 0.25);
  Engine g(42), h(42);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(bgdge_sample(b, g), bgdge_sample(b, h));
}

TEST(BgdgeSample, MatchesJointPmf) {
  for (const BgdgeParams& b : {BgdgeParams(2, 0.25, 2, 0.25, 0.25), BgdgeParams(0.8, 0.5, 1.6, 0.4, 0.6)}) {
    Engine g(31337);
    const int m = 100000;
    std::vector<double> obs(36, 0.0), probs(36, 0.0);
    for (int i = 0; i < m; ++i) {
      const BivCell c = bgdge_sample(b, g);
      if (c.x < 6 && c.y < 6) obs[static_cast<std::size_t>(c.x * 6 + c.y)] += 1;
    }
    for (std::int64_t x = 0; x < 6; ++x)
      for (std::int64_t y = 0; y < 6; ++y) probs[static_cast<std::size_t>(x * 6 + y)] = bgdge_pmf(b, {x, y});
    EXPECT_GT(testing_support::chi2_pvalue_cells(obs, probs, m), 0.01);
  }
}

TEST(BivCompoundGeometric, Parameters) {
  const BgdgeParams b(1, 0.5, 2, 0.4, 0.8);
  EXPECT_DOUBLE_EQ(biv_compound_geometric_params(b, 0.5).theta(), 0.4);
  EXPECT_EQ(biv_compound_geometric_params(b, 1.0), b);
}

TEST(BivCompoundGeometric, MonteCarloMaximum) {
  const BgdgeParams b(1.2, 0.5, 0.7, 0.6, 0.7);
  const double q = 0.5;
  const BgdgeParams target = biv_compound_geometric_params(b, q);
  Engine g(4242);
  const int m = 100000;
  std::vector<BivCell> draws(m);
  for (auto& d : draws) {
    const std::int64_t k = sample_geometric(q, g);
    BivCell best{0, 0};
    for (std::int64_t i = 0; i < k; ++i) {
      const BivCell c = bgdge_sample(b, g);
      best.x = std::max(best.x, c.x);
      best.y = std::max(best.y, c.y);
    }
    d = best;
  }
  double worst = 0;
  for (std::int64_t x = 0; x < 12; ++x)
    for (std::int64_t y = 0; y < 12; ++y) {
      double n = 0;
      for (const auto& d : draws) n += (d.x <= x && d.y <= y) ? 1 : 0;
      worst = std::max(worst, std::abs(n / m - bgdge_cdf(target, static_cast<double>(x), static_cast<double>(y))));
    }
  EXPECT_LT(worst, 0.01);
}

TEST(BgdgeGeneratingFunctions, Normalization) {
  const BgdgeParams b(1.2, 0.5, 0.7, 0.6, 0.7);
  EXPECT_NEAR(bgdge_pgf(b, 0, 0, 1e-12), bgdge_pmf(b, {0, 0}), 1e-15);
  EXPECT_NEAR(bgdge_mgf(b, 0, 0, 1e-12), 1.0, 1e-11);
  const BgdgeParams one(1, 0.5, 1, 0.5, 1.0);
  EXPECT_NEAR(bgdge_pgf(one, 0.5, 0.5, 1e-13), 4.0 / 9, 1e-12);
  EXPECT_THROW(bgdge_pgf(b, 1.0, 0, 1e-10), DomainError);
}
