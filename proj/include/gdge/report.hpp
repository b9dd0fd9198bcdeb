#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gdge/em.hpp"
#include "gdge/infer.hpp"

namespace gdge {

/// Flat `key = value` document; keys keep insertion order so output is stable and diffable.
class Report {
public:
  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }
  void add(std::string key, const char* value) { add(std::move(key), std::string(value)); }
  void add(std::string key, double value) { add(std::move(key), format_number(value)); }
  void add(std::string key, int value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, long value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, long long value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, unsigned long value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, unsigned long long value) { add(std::move(key), std::to_string(value)); }
  void add(std::string key, bool value) { add(std::move(key), std::string(value ? "true" : "false")); }

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return &v;
    return nullptr;
  }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
  }

  std::string str() const {
    std::string s;
    for (const auto& [k, v] : entries_) s += k + " = " + v + '\n';
    return s;
  }

  static std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
  }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Estimates, errors, intervals and run diagnostics under `prefix`.
inline void add_fit(Report& r, const FitReport& fit, const std::string& prefix = "fit.") {
  r.add(prefix + "model", to_string(fit.model));
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const std::string& n = fit.names[i];
    r.add(prefix + "init." + n, fit.init.at(i));
  }
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const std::string& n = fit.names[i];
    r.add(prefix + "estimate." + n, fit.estimates.at(i));
    r.add(prefix + "se." + n, i < fit.std_errors.size() ? fit.std_errors[i] : kNaN);
    r.add(prefix + "ci95_lo." + n, i < fit.ci95.size() ? fit.ci95[i].first : kNaN);
    r.add(prefix + "ci95_hi." + n, i < fit.ci95.size() ? fit.ci95[i].second : kNaN);
  }
  r.add(prefix + "loglik", fit.loglik);
  r.add(prefix + "iterations", fit.iters);
  r.add(prefix + "em_maps", fit.em_maps);
  r.add(prefix + "converged", fit.converged);
  r.add(prefix + "stop_reason", to_string(fit.stop_reason));
  r.add(prefix + "theta_at_boundary", fit.theta_at_boundary);
  r.add(prefix + "warnings", static_cast<int>(fit.warnings.size()));
  for (std::size_t i = 0; i < fit.warnings.size(); ++i) r.add(prefix + "warning." + std::to_string(i + 1), fit.warnings[i]);
}

inline void add_config(Report& r, const EmConfig& cfg, const std::string& prefix = "config.") {
  r.add(prefix + "e_step", to_string(cfg.e_step));
  r.add(prefix + "accelerate", cfg.accelerate);
  r.add(prefix + "ll_rel_tol", cfg.ll_rel_tol);
  r.add(prefix + "param_tol", cfg.param_tol);
  r.add(prefix + "max_iter", cfg.max_iter);
  r.add(prefix + "n_cap", static_cast<long long>(cfg.n_cap));
  r.add(prefix + "inner_tol", cfg.inner_tol);
  r.add(prefix + "p_grid", cfg.p_grid);
  r.add(prefix + "theta_min", cfg.theta_min);
}

inline void add_gof(Report& r, const GofResult& g, const std::string& prefix = "gof.") {
  r.add(prefix + "statistic", g.statistic);
  r.add(prefix + "df", g.df);
  r.add(prefix + "p_value", g.p_value);
  r.add(prefix + "cells", static_cast<int>(g.cells.size()));
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const GofCell& c = g.cells[i];
    const std::string k = prefix + "cell." + std::to_string(i + 1) + ".";
    r.add(k + "label", c.label);
    r.add(k + "observed", c.observed);
    r.add(k + "expected", c.expected);
    r.add(k + "pooled", c.pooled);
  }
}

inline void add_test(Report& r, const TestResult& t, const std::string& prefix) {
  r.add(prefix + "statistic", t.statistic);
  r.add(prefix + "reference", t.reference);
  r.add(prefix + "p_value", t.p_value);
  r.add(prefix + "ll_full", t.ll_full);
  r.add(prefix + "ll_null", t.ll_null);
  for (std::size_t i = 0; i < t.null_fit.names.size(); ++i)
    r.add(prefix + "null." + t.null_fit.names[i], t.null_fit.estimates.at(i));
  r.add(prefix + "warnings", static_cast<int>(t.warnings.size()));
  for (std::size_t i = 0; i < t.warnings.size(); ++i) r.add(prefix + "warning." + std::to_string(i + 1), t.warnings[i]);
}

}  // namespace gdge
