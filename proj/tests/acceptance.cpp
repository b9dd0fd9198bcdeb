// Acceptance checks. Each criterion prints one PASS/FAIL line (plus detail lines)
// and the process exits nonzero if it fails. Run with --criterion N, or no
// arguments for all of them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "gdge.hpp"
#include "support.hpp"

using namespace gdge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

BivDataset serie_a() { return read_biv_file(std::string(GDGE_DATA_DIR) + "/seriea.csv"); }

void detail_line(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

bool verdict(int n, const char* what, bool ok) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", what);
  return ok;
}

bool within(double got, double want, double tol) { return std::abs(got - want) <= tol; }

// ---- 1: univariate Serie A fits

bool uni_fit_ok(const UniDataset& d, const char* label, double a, double p, double t, double ll_floor, double ll_reference) {
  const auto t0 = Clock::now();
  const FitReport f = em_fit_uni(d, default_init_uni(d));
  const double sec = seconds_since(t0);
  const bool close = within(f.estimates[0], a, 0.05) && within(f.estimates[1], p, 0.05) && within(f.estimates[2], t, 0.05);
  const bool ok = f.loglik >= ll_floor && (close || f.loglik > ll_reference) && sec < 10;
  detail_line("%s: alpha=%.4f p=%.4f theta=%.4f LL=%.6f (reference LL %.4f) close=%d %.2fs", label, f.estimates[0],
              f.estimates[1], f.estimates[2], f.loglik, ll_reference, close, sec);
  return ok;
}

bool criterion_1() {
  const BivDataset d = serie_a();
  bool ok = uni_fit_ok(d.column(Axis::X), "X1", 4.6587, 0.2618, 0.9987, -33.45, -33.4193);
  ok = uni_fit_ok(d.column(Axis::Y), "X2", 6.8029, 0.1683, 0.3288, -31.92, -31.8832) && ok;
  return verdict(1, "univariate Serie A fits", ok);
}

// ---- 2: bivariate Serie A fit from the marginal-fit start

bool criterion_2() {
  const BivDataset d = serie_a();
  const BgdgeParams reference(4.5519, 0.2570, 8.3892, 0.2250, 0.9211);
  const double ll_reference = observed_loglik_biv(reference, d);
  const auto t0 = Clock::now();
  const FitReport f = em_fit_biv(d, BgdgeParams(4.6587, 0.2618, 6.8029, 0.1683, 0.6638));
  const double sec = seconds_since(t0);
  const auto& e = f.estimates;
  const bool close = within(e[0], 4.5519, 0.1) && within(e[1], 0.2570, 0.1) && within(e[2], 8.3892, 0.1) &&
                     within(e[3], 0.2250, 0.1) && within(e[4], 0.9211, 0.02);
  const bool higher = f.loglik > ll_reference;
  detail_line("estimates %.4f %.4f %.4f %.4f theta=%.4f LL=%.6f; reference point LL=%.6f", e[0], e[1], e[2], e[3], e[4],
              f.loglik, ll_reference);
  detail_line("converged=%d stop=%s iterations=%d close=%d higher=%d %.2fs", f.converged, to_string(f.stop_reason), f.iters,
              close, higher, sec);
  return verdict(2, "bivariate Serie A fit", f.converged && (close || higher) && sec < 60);
}

// ---- 3: contingency table expected counts at the reference point

bool criterion_3() {
  const BivDataset d = serie_a();
  const BgdgeParams reference(4.5519, 0.2570, 8.3892, 0.2250, 0.9211);
  const double table[4][4] = {{0.64, 3.31, 1.75, 0.30}, {1.17, 6.32, 3.51, 0.98}, {0.88, 2.67, 1.54, 0.44}, {0.84, 0.69, 0.78, 1.16}};
  GofOptions opt;
  opt.pool_min = 0;
  opt.tail_cell = false;
  const GofResult g = gof_chisq_biv(d, reference, opt);
  int matched = 0;
  for (std::int64_t x = 0; x < 4; ++x) {
    std::string row;
    for (std::int64_t y = 0; y < 4; ++y) {
      const double e = g.cells[static_cast<std::size_t>(4 * x + y)].expected;
      const bool hit = within(e, table[x][y], 0.02);
      matched += hit;
      char buf[64];
      std::snprintf(buf, sizeof buf, " %6.3f(%5.2f)%s", e, table[x][y], hit ? "" : "*");
      row += buf;
    }
    detail_line("x=%lld:%s", static_cast<long long>(x), row.c_str());
  }
  GofOptions folded;
  folded.pool_min = 0;
  const double stat_folded = gof_chisq_biv(d, reference, folded).statistic;
  detail_line("cells within 0.02: %d/16; chi-square %.4f (tails folded: %.4f), target 7.79", matched, g.statistic, stat_folded);
  return verdict(3, "expected frequencies and chi-square at the reference point", matched == 16 && within(g.statistic, 7.79, 0.1));
}

// ---- 4: Monte Carlo bias/MSE at the reference truth

bool criterion_4() {
  struct Ref {
    std::int64_t n;
    double ae[5], mse[5];
  };
  const Ref refs[2] = {{25, {1.7124, 0.1987, 1.7215, 0.1921, 0.2011}, {0.5716, 0.0581, 0.5618, 0.0534, 0.0611}},
                       {100, {1.9891, 0.2510, 2.0104, 0.2498, 0.2501}, {0.1439, 0.0143, 0.1411, 0.0137, 0.0114}}};
  SimSpec spec;
  spec.truth = BgdgeParams(2.0, 0.25, 2.0, 0.25, 0.25);
  spec.sample_sizes = {25, 100};
  spec.replications = 200;
  spec.seed = 20240601;
  spec.threads = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = Clock::now();
  const SimTable t = run_simulation(spec);
  const double sec = seconds_since(t0);
  bool ok = sec < 900;
  for (std::size_t r = 0; r < 2; ++r) {
    const SimRow& row = t.rows[r];
    detail_line("n=%lld used=%d not_converged=%d errors=%d theta_at_1=%d", static_cast<long long>(row.n), row.used,
                row.not_converged, row.errors, row.at_boundary);
    for (std::size_t k = 0; k < 5; ++k) {
      const bool ae_ok = within(row.ae[k], refs[r].ae[k], 0.15);
      const bool mse_ok = std::abs(row.mse[k] - refs[r].mse[k]) <= 0.5 * refs[r].mse[k];
      ok = ok && ae_ok && mse_ok;
      detail_line("  %-7s AE %.4f (ref %.4f)%s  MSE %.4f (ref %.4f)%s", t.names[k].c_str(), row.ae[k], refs[r].ae[k],
                  ae_ok ? "" : " *", row.mse[k], refs[r].mse[k], mse_ok ? "" : " *");
    }
  }
  for (std::size_t k = 0; k < 5; ++k) {
    const bool dec = t.rows[1].mse[k] < t.rows[0].mse[k];
    if (!dec) detail_line("MSE of %s does not decrease with n", t.names[k].c_str());
    ok = ok && dec;
  }
  detail_line("%.1fs on %u thread(s)", sec, spec.threads);
  return verdict(4, "simulation AE/MSE at 200 replications", ok);
}

// ---- 5: property suites

bool property_mixture() {
  for (double a : {0.5, 1.0, 4.0})
    for (double p : {0.2, 0.5, 0.85})
      for (double t : {0.1, 0.5, 0.9}) {
        const UgdgeParams u(a, p, t);
        for (int K : {1, 2, 5, 20})
          for (int i = 0; i < 50; ++i) {
            const double x = i * 0.5;
            if (std::abs(ugdge_mixture_cdf(u, x, K) - ugdge_cdf(u, x)) > std::pow(1 - t, K) + 1e-15) return false;
          }
      }
  return true;
}

bool property_ascent() {
  Engine g(4242);
  EmConfig cfg;
  cfg.compute_se = false;
  for (int rep = 0; rep < 50; ++rep) {
    const BgdgeParams truth(0.5 + 3 * uniform_open01(g), 0.15 + 0.5 * uniform_open01(g), 0.5 + 3 * uniform_open01(g),
                            0.15 + 0.5 * uniform_open01(g), 0.1 + 0.9 * uniform_open01(g));
    BivDataset d;
    for (int i = 0; i < 30; ++i) d.pairs.push_back(bgdge_sample(truth, g));
    const FitReport f = em_fit_biv(d, truth, cfg);
    for (std::size_t i = 1; i < f.ll_trace.size(); ++i)
      if (f.ll_trace[i] < f.ll_trace[i - 1] - 1e-8) return false;
  }
  return true;
}

bool property_log_concave() {
  Engine g(99);
  for (int rep = 0; rep < 100; ++rep) {
    const double p = 0.02 + 0.96 * uniform_open01(g);
    std::vector<WeightedObs> obs;
    const int k = 1 + static_cast<int>(6 * uniform_open01(g));
    for (int i = 0; i < k; ++i)
      obs.push_back({static_cast<std::int64_t>(10 * uniform_open01(g)), 1.0 + std::floor(5 * uniform_open01(g)), 0.1 + 3 * uniform_open01(g)});
    double pa = 0, pv = 0, pd = 0;
    bool have_d = false;
    for (double la = -5; la <= 4; la += 0.05) {
      const double a = std::exp(la), v = pair_objective(a, p, obs);
      if (la > -5) {
        const double d1 = (v - pv) / (a - pa);
        if (have_d && d1 - pd > 1e-9 * std::max(1.0, std::abs(pd))) return false;
        pd = d1;
        have_d = true;
      }
      pa = a;
      pv = v;
    }
  }
  return true;
}

bool property_sampler() {
  const int m = 100000;
  const UgdgeParams unis[3] = {UgdgeParams(2, 0.25, 0.25), UgdgeParams(0.7, 0.6, 0.8), UgdgeParams(5, 0.3, 1.0)};
  for (std::size_t i = 0; i < 3; ++i) {
    Engine g(1000 + i);
    std::vector<std::int64_t> draws(m);
    for (auto& v : draws) v = ugdge_sample(unis[i], g);
    const double pv = testing_support::chi2_pvalue_int(draws, [&](std::int64_t x) { return ugdge_pmf(unis[i], x); });
    detail_line("  sampler uni %zu: p=%.4f", i, pv);
    if (!(pv > 0.01)) return false;
  }
  const BgdgeParams bivs[2] = {BgdgeParams(2, 0.25, 2, 0.25, 0.25), BgdgeParams(0.8, 0.5, 1.6, 0.4, 0.6)};
  for (std::size_t i = 0; i < 2; ++i) {
    Engine g(2000 + i);
    std::vector<double> obs(36, 0.0), probs(36, 0.0);
    for (int j = 0; j < m; ++j) {
      const BivCell c = bgdge_sample(bivs[i], g);
      if (c.x < 6 && c.y < 6) obs[static_cast<std::size_t>(c.x * 6 + c.y)] += 1;
    }
    for (std::int64_t x = 0; x < 6; ++x)
      for (std::int64_t y = 0; y < 6; ++y) probs[static_cast<std::size_t>(x * 6 + y)] = bgdge_pmf(bivs[i], {x, y});
    const double pv = testing_support::chi2_pvalue_cells(obs, probs, m);
    detail_line("  sampler biv %zu: p=%.4f", i, pv);
    if (!(pv > 0.01)) return false;
  }
  return true;
}

bool property_ordering() {
  for (double x = 0; x <= 40; x += 1) {
    for (double t : {0.2, 0.6, 1.0}) {
      if (!(ugdge_cdf(UgdgeParams(3.0, 0.5, t), x) <= ugdge_cdf(UgdgeParams(1.5, 0.5, t), x))) return false;
      if (!(ugdge_cdf(UgdgeParams(2.0, 0.7, t), x) <= ugdge_cdf(UgdgeParams(2.0, 0.5, t), x))) return false;
    }
    if (!(ugdge_cdf(UgdgeParams(2.0, 0.5, 0.2), x) <= ugdge_cdf(UgdgeParams(2.0, 0.5, 0.8), x))) return false;
    for (double y = 0; y <= 20; y += 2)
      if (!(bgdge_cdf(BgdgeParams(2, 0.5, 1, 0.4, 0.3), x, y) <= bgdge_cdf(BgdgeParams(2, 0.5, 1, 0.4, 0.7), x, y))) return false;
  }
  return true;
}

bool property_quantiles() {
  for (double a : {0.5, 2.0, 6.0})
    for (double p : {0.1, 0.5, 0.9})
      for (double t : {0.05, 0.5, 1.0}) {
        const UgdgeParams u(a, p, t);
        for (int k = 1; k <= 99; ++k) {
          const double g = k / 100.0;
          const std::int64_t q = ugdge_quantile(u, g);
          if (!(ugdge_cdf(u, static_cast<double>(q)) >= g) || !(ugdge_cdf(u, static_cast<double>(q - 1)) < g)) return false;
        }
      }
  return true;
}

bool criterion_5() {
  const std::pair<const char*, std::function<bool()>> suites[] = {
      {"(a) mixture bound", property_mixture},   {"(b) EM ascent", property_ascent},
      {"(c) log-concavity in alpha", property_log_concave}, {"(d) samplers vs pmf", property_sampler},
      {"(e) stochastic ordering", property_ordering}, {"(f) quantile bracketing", property_quantiles}};
  bool ok = true;
  for (const auto& [name, run] : suites) {
    const bool r = run();
    detail_line("%s: %s", name, r ? "ok" : "violated");
    ok = ok && r;
  }
  return verdict(5, "property suites", ok);
}

// ---- 6: independence test at theta = 1

bool criterion_6() {
  const BgdgeParams truth(2.0, 0.25, 2.0, 0.25, 1.0);
  EmConfig cfg;
  cfg.compute_se = false;
  int zeros = 0, failures = 0;
  const auto t0 = Clock::now();
  for (int rep = 0; rep < 200; ++rep) {
    try {
      const TestResult t = test_independence(simulate_dataset(truth, 100, 777, static_cast<std::uint64_t>(rep)), cfg);
      if (t.statistic == 0.0) ++zeros;
    } catch (const Error&) {
      ++failures;
    }
  }
  const double share = zeros / 200.0;
  detail_line("statistic exactly 0 in %d/200 (%.1f%%), failures %d, %.1fs", zeros, 100 * share, failures, seconds_since(t0));
  return verdict(6, "independence test boundary mass", failures == 0 && share >= 0.4 && share <= 0.6);
}

}  // namespace

int main(int argc, char** argv) {
  const std::function<bool()> criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which.push_back(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (which.empty()) which = {1, 2, 3, 4, 5, 6};
  bool ok = true;
  for (int n : which) {
    if (n < 1 || n > 6) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    try {
      ok = criteria[n - 1]() && ok;
    } catch (const std::exception& e) {
      std::printf("criterion %d: FAIL  threw: %s\n", n, e.what());
      ok = false;
    }
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
