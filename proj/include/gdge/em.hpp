#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gdge/bgdge.hpp"
#include "gdge/dataset.hpp"
#include "gdge/errors.hpp"
#include "gdge/latent.hpp"
#include "gdge/numeric.hpp"
#include "gdge/profile.hpp"
#include "gdge/ugdge.hpp"

namespace gdge {

/// How the latent counts enter the M-step.
enum class EStepMode {
  Posterior,      ///< full conditional law of N (classical EM)
  Argmax,         ///< conditional mode of N, one imputed count per observation
  ExpectedCount,  ///< E(N | obs) plugged in as a fractional count
};

struct EmConfig {
  double ll_rel_tol = 1e-8;
  double param_tol = 1e-6;
  int max_iter = 500;
  std::int64_t n_cap = kDefaultCountCap;
  double inner_tol = 1e-8;
  int p_grid = 64;
  EStepMode e_step = EStepMode::Posterior;
  AlphaSearch alpha_search = AlphaSearch::Newton;
  bool accelerate = true;      ///< SQUAREM extrapolation (posterior mode only)
  double weight_tol = 1e-13;   ///< posterior truncation, relative mass
  double theta_min = 5e-2;     ///< lower clamp for theta; small-sample likelihoods can climb toward theta -> 0
  bool compute_se = true;

  void validate() const {
    if (!(ll_rel_tol > 0 && param_tol > 0 && inner_tol > 0 && weight_tol > 0 && theta_min > 0 && theta_min < 1))
      throw DomainError("EmConfig: tolerances must be positive");
    if (max_iter < 1) throw DomainError("EmConfig: max_iter must be at least 1");
    if (n_cap < 1) throw DomainError("EmConfig: n_cap must be at least 1");
    if (p_grid < 3) throw DomainError("EmConfig: p_grid must be at least 3");
  }

  PairSearch pair_search() const { return {p_grid, inner_tol, alpha_search}; }
};

enum class ModelKind { Univariate, Bivariate, BivariateEqualMarginals };

enum class StopReason {
  Tolerance,    ///< log-likelihood and parameter changes below tolerance
  AscentStall,  ///< the next update would lower the observed log-likelihood
  MaxIter,
  Boundary,     ///< theta = 1 fit dominates the interior run
};

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::AscentStall: return "ascent_stall";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::Boundary: return "boundary";
  }
  return "unknown";
}

inline const char* to_string(EStepMode m) {
  switch (m) {
    case EStepMode::Posterior: return "posterior";
    case EStepMode::Argmax: return "argmax";
    case EStepMode::ExpectedCount: return "expected";
  }
  return "unknown";
}

inline const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Univariate: return "uni";
    case ModelKind::Bivariate: return "biv";
    case ModelKind::BivariateEqualMarginals: return "biv_equal";
  }
  return "unknown";
}

/// Outcome of one maximum-likelihood fit. Parameter order:
/// uni (alpha, p, theta); biv (alpha1, p1, alpha2, p2, theta); biv_equal (alpha, p, theta).
struct FitReport {
  ModelKind model = ModelKind::Univariate;
  std::vector<std::string> names;
  std::vector<double> init;
  std::vector<double> estimates;
  std::vector<double> std_errors;
  std::vector<std::pair<double, double>> ci95;
  double loglik = -kInf;
  int iters = 0;
  int em_maps = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIter;
  bool theta_at_boundary = false;
  std::vector<double> ll_trace;
  std::vector<std::string> warnings;

  double theta() const { return estimates.back(); }
};

inline std::vector<std::string> parameter_names(ModelKind model) {
  switch (model) {
    case ModelKind::Univariate: return {"alpha", "p", "theta"};
    case ModelKind::Bivariate: return {"alpha1", "p1", "alpha2", "p2", "theta"};
    case ModelKind::BivariateEqualMarginals: return {"alpha", "p", "theta"};
  }
  return {};
}

inline std::vector<double> to_vector(const UgdgeParams& u) { return {u.alpha(), u.p(), u.theta()}; }
inline std::vector<double> to_vector(const BgdgeParams& b) {
  return {b.m1().alpha(), b.m1().p(), b.m2().alpha(), b.m2().p(), b.theta()};
}
inline UgdgeParams uni_from_vector(const std::vector<double>& v) { return UgdgeParams(v.at(0), v.at(1), v.at(2)); }
inline BgdgeParams biv_from_vector(const std::vector<double>& v) {
  if (v.size() == 3) return BgdgeParams(v[0], v[1], v[0], v[1], v[2]);
  return BgdgeParams(v.at(0), v.at(1), v.at(2), v.at(3), v.at(4));
}

inline UgdgeParams uni_params(const FitReport& r) { return uni_from_vector(r.estimates); }
inline BgdgeParams biv_params(const FitReport& r) { return biv_from_vector(r.estimates); }

// ---------------------------------------------------------------------------
// Likelihoods

inline double observed_loglik_uni(const UgdgeParams& params, const UniDataset& data) {
  double ll = 0;
  for (const auto& [x, count] : data.counts()) {
    const double lp = ugdge_log_pmf(params, x);
    if (lp == -kInf) throw EvaluationError("log-likelihood: P(X = " + std::to_string(x) + ") underflows to 0");
    ll += static_cast<double>(count) * lp;
  }
  return ll;
}

inline double observed_loglik_biv(const BgdgeParams& params, const BivDataset& data) {
  double ll = 0;
  for (const auto& [cell, count] : data.contingency()) {
    const double lp = bgdge_log_pmf(params, cell);
    if (lp == -kInf)
      throw EvaluationError("log-likelihood: P(X = " + std::to_string(cell.x) + ", Y = " + std::to_string(cell.y) +
                            ") underflows to 0");
    ll += static_cast<double>(count) * lp;
  }
  return ll;
}

/// m ln theta + (k - m) ln(1 - theta) + g1(alpha1, p1) + g2(alpha2, p2) for known counts.
inline double complete_loglik(const BgdgeParams& params, const BivDataset& data, std::span<const std::int64_t> counts) {
  if (counts.size() != data.size()) throw DomainError("complete_loglik: one count per observation required");
  double k = 0;
  double g = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1) throw DomainError("complete_loglik: counts must be at least 1");
    const double n = static_cast<double>(counts[i]);
    k += n;
    g += detail::log_dge_pmf_shape(n * params.m1().alpha(), params.m1().log_p(), data.pairs[i].x);
    g += detail::log_dge_pmf_shape(n * params.m2().alpha(), params.m2().log_p(), data.pairs[i].y);
  }
  const double m = static_cast<double>(data.size());
  const double t = params.theta();
  double ll = m * std::log(t) + g;
  if (k > m) {
    if (t == 1.0) throw DomainError("complete_loglik: theta = 1 is impossible with a count above 1");
    ll += (k - m) * std::log1p(-t);
  }
  return ll;
}

/// Conditional-mode latent counts for every pair.
inline std::vector<std::int64_t> e_step(const BgdgeParams& params, const BivDataset& data, const EmConfig& cfg) {
  std::vector<std::int64_t> out;
  out.reserve(data.size());
  for (const BivCell& c : data.pairs) out.push_back(detail::latent_kernel(params, c).argmax(cfg.n_cap));
  return out;
}

inline std::vector<std::int64_t> e_step_uni(const UgdgeParams& params, const UniDataset& data, const EmConfig& cfg) {
  std::vector<std::int64_t> out;
  out.reserve(data.size());
  for (std::int64_t x : data.values) out.push_back(detail::latent_kernel(params, x).argmax(cfg.n_cap));
  return out;
}

namespace detail {

/// M-step input assembled from one E-step.
struct LatentSummary {
  double total_count = 0;  // k
  std::vector<WeightedObs> first;
  std::vector<WeightedObs> second;
};

/// Expands the conditional law of N at one observation into weighted M-step terms.
template <class Emit>
double expand_latent(const LatentCountKernel& kernel, double count, const EmConfig& cfg, Emit&& emit) {
  switch (cfg.e_step) {
    case EStepMode::Argmax: {
      const double n = static_cast<double>(kernel.argmax(cfg.n_cap));
      emit(n, count);
      return count * n;
    }
    case EStepMode::ExpectedCount: {
      const double n = kernel.mean(cfg.weight_tol, cfg.n_cap);
      emit(n, count);
      return count * n;
    }
    case EStepMode::Posterior: {
      const std::vector<double> w = kernel.posterior(cfg.weight_tol, cfg.n_cap);
      double k = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        emit(n, count * w[i]);
        k += count * w[i] * n;
      }
      return k;
    }
  }
  return 0;
}

inline LatentSummary summarize(const BgdgeParams& params, const std::vector<std::pair<BivCell, std::int64_t>>& cells,
                               const EmConfig& cfg) {
  LatentSummary s;
  for (const auto& [cell, count] : cells) {
    const LatentCountKernel kernel = latent_kernel(params, cell);
    s.total_count += expand_latent(kernel, static_cast<double>(count), cfg, [&](double n, double w) {
      s.first.push_back({cell.x, n, w});
      s.second.push_back({cell.y, n, w});
    });
  }
  s.first = consolidate(std::move(s.first));
  s.second = consolidate(std::move(s.second));
  return s;
}

inline LatentSummary summarize(const UgdgeParams& params, const std::vector<std::pair<std::int64_t, std::int64_t>>& cells,
                               const EmConfig& cfg) {
  LatentSummary s;
  for (const auto& [x, count] : cells) {
    const LatentCountKernel kernel = latent_kernel(params, x);
    s.total_count += expand_latent(kernel, static_cast<double>(count), cfg,
                                   [&](double n, double w) { s.first.push_back({x, n, w}); });
  }
  s.first = consolidate(std::move(s.first));
  return s;
}

/// M-step for one (alpha, p) block that never returns a worse objective than `current`.
inline DgeParams improve_pair(std::span<const WeightedObs> obs, const DgeParams& current, const EmConfig& cfg,
                              std::vector<std::string>* warnings) {
  const PairFit fit = m_step_pair(obs, cfg.pair_search(), current);
  const double old_value = pair_objective(current.alpha(), current.p(), obs);
  if (fit.boundary && warnings) warnings->push_back("M-step maximizer on the boundary of the (alpha, p) search range");
  if (!(fit.value >= old_value)) return current;
  return DgeParams(fit.alpha, fit.p);
}

inline double theta_update(double m, double k, const EmConfig& cfg) { return std::clamp(m / k, cfg.theta_min, 1.0); }

enum class Coord { Positive, Unit, Theta };

/// Generic EM driver with optional SQUAREM acceleration and a monotone guard.
struct EmRun {
  std::vector<double> params;
  double loglik = -kInf;
  int iters = 0;
  int maps = 0;
  StopReason reason = StopReason::MaxIter;
  std::vector<double> trace;
};

inline std::vector<double> to_free(const std::vector<double>& v, const std::vector<Coord>& kind) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = kind[i] == Coord::Positive ? std::log(v[i]) : logit(v[i]);
  return out;
}

inline std::vector<double> from_free(const std::vector<double>& v, const std::vector<Coord>& kind, double theta_min) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (kind[i] == Coord::Positive) out[i] = std::clamp(std::exp(v[i]), kAlphaMin, kAlphaMax);
    else out[i] = std::clamp(logistic(v[i]), kind[i] == Coord::Theta ? theta_min : 1e-12, 1 - 1e-12);
  }
  return out;
}

inline EmRun run_em(std::vector<double> start, const std::function<std::vector<double>(const std::vector<double>&)>& em_map,
                    const std::function<double(const std::vector<double>&)>& loglik, const std::vector<Coord>& kind,
                    const EmConfig& cfg) {
  EmRun run;
  run.params = std::move(start);
  run.loglik = loglik(run.params);
  run.trace.push_back(run.loglik);
  const bool accelerate = cfg.accelerate && cfg.e_step == EStepMode::Posterior;
  double step_max = 1.0;
  auto map = [&](const std::vector<double>& v) {
    ++run.maps;
    return em_map(v);
  };
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    std::vector<double> next;
    double next_ll;
    if (accelerate) {
      const std::vector<double> x1 = map(run.params);
      const std::vector<double> x2 = map(x1);
      next = x2;
      next_ll = loglik(x2);
      const std::vector<double> f0 = to_free(run.params, kind), f1 = to_free(x1, kind), f2 = to_free(x2, kind);
      double rr = 0, vv = 0;
      std::vector<double> r(f0.size()), v(f0.size());
      for (std::size_t i = 0; i < f0.size(); ++i) {
        r[i] = f1[i] - f0[i];
        v[i] = f2[i] - 2 * f1[i] + f0[i];
        rr += r[i] * r[i];
        vv += v[i] * v[i];
      }
      if (vv > 0 && std::isfinite(rr) && std::isfinite(vv)) {
        double s = -std::sqrt(rr / vv);
        if (s > -1) s = -1;
        const bool at_max = s <= -step_max;
        s = std::max(s, -step_max);
        if (s < -1) {
          std::vector<double> fe(f0.size());
          for (std::size_t i = 0; i < f0.size(); ++i) fe[i] = f0[i] - 2 * s * r[i] + s * s * v[i];
          try {
            const std::vector<double> xe = map(from_free(fe, kind, cfg.theta_min));
            const double lle = loglik(xe);
            if (lle >= next_ll) {
              next = xe;
              next_ll = lle;
              if (at_max) step_max *= 4;
            } else {
              step_max = std::max(1.0, step_max / 4);
            }
          } catch (const Error&) {
            step_max = std::max(1.0, step_max / 4);
          }
        } else if (at_max) {
          step_max *= 4;
        }
      }
    } else {
      next = map(run.params);
      next_ll = loglik(next);
    }
    if (next_ll < run.loglik - 1e-12 * std::max(1.0, std::abs(run.loglik))) {
      run.reason = StopReason::AscentStall;
      return run;
    }
    double dparam = 0;
    for (std::size_t i = 0; i < next.size(); ++i) dparam = std::max(dparam, std::abs(next[i] - run.params[i]));
    const double dll = std::abs(next_ll - run.loglik) / std::max(1.0, std::abs(run.loglik));
    run.params = std::move(next);
    run.loglik = next_ll;
    run.iters = iter;
    run.trace.push_back(next_ll);
    if (dll < cfg.ll_rel_tol && dparam < cfg.param_tol) {
      run.reason = StopReason::Tolerance;
      return run;
    }
  }
  run.reason = StopReason::MaxIter;
  return run;
}

inline double clamp_initial_theta(double theta, const EmConfig& cfg) { return std::clamp(theta, cfg.theta_min, 0.99); }

inline void note_theta_floor(FitReport& report, const EmConfig& cfg) {
  if (report.theta() <= cfg.theta_min * (1 + 1e-9))
    report.warnings.push_back("theta held at its lower bound theta_min; the likelihood keeps rising toward theta -> 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Standard errors

struct StdErrorResult {
  std::vector<double> se;                 ///< NaN where unavailable
  std::vector<std::vector<double>> info;  ///< observed information over the free parameters
  std::vector<std::size_t> free_index;    ///< parameters included in `info`
  std::vector<std::string> warnings;
};

namespace detail {

inline bool invert_spd(const std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& inv) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = a[i][j];
  if (!m.allFinite()) return false;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd c = llt.solve(Eigen::MatrixXd::Identity(n, n));
  inv.assign(a.size(), std::vector<double>(a.size()));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) inv[i][j] = c(i, j);
  return true;
}

/// Observed information by central differences of `loglik`; the last parameter is theta.
inline StdErrorResult numeric_std_errors(const std::vector<double>& est,
                                         const std::function<double(const std::vector<double>&)>& loglik) {
  StdErrorResult out;
  const std::size_t dim = est.size();
  out.se.assign(dim, kNaN);
  std::vector<double> h(dim);
  for (std::size_t i = 0; i < dim; ++i) h[i] = std::max(1e-4, 1e-4 * std::abs(est[i]));
  const std::size_t theta_index = dim - 1;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i == theta_index) {
      const double room = 1.0 - est[i];
      if (room <= 0) {
        out.warnings.push_back("theta at the boundary 1: no standard error for theta");
        continue;
      }
      if (room < 2 * h[i]) {
        h[i] = 0.5 * room;
        if (h[i] < 1e-7) {
          out.warnings.push_back("theta within 1e-7 of the boundary: no standard error for theta");
          continue;
        }
      }
    } else if (i % 2 == 1) {
      // probabilities must stay inside (0, 1)
      h[i] = std::min(h[i], 0.5 * std::min(est[i], 1 - est[i]));
    }
    out.free_index.push_back(i);
  }
  const std::size_t k = out.free_index.size();
  const double f0 = loglik(est);
  out.info.assign(k, std::vector<double>(k, 0.0));
  auto at = [&](std::size_t a, double da, std::size_t b, double db) {
    std::vector<double> v = est;
    v[a] += da;
    v[b] += db;
    return loglik(v);
  };
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t i = out.free_index[a];
    const double hi = h[i];
    out.info[a][a] = -(at(i, hi, i, 0) - 2 * f0 + at(i, -hi, i, 0)) / (hi * hi);
    for (std::size_t b = a + 1; b < k; ++b) {
      const std::size_t j = out.free_index[b];
      const double hj = h[j];
      const double v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) / (4 * hi * hj);
      out.info[a][b] = -v;
      out.info[b][a] = -v;
    }
  }
  std::vector<std::vector<double>> cov;
  if (!invert_spd(out.info, cov)) {
    out.warnings.push_back("observed information is singular or not positive definite");
    return out;
  }
  for (std::size_t a = 0; a < k; ++a) out.se[out.free_index[a]] = std::sqrt(cov[a][a]);
  return out;
}

inline void attach_std_errors(FitReport& report, const StdErrorResult& se) {
  report.std_errors = se.se;
  report.ci95.clear();
  for (std::size_t i = 0; i < report.estimates.size(); ++i)
    report.ci95.emplace_back(report.estimates[i] - 1.96 * se.se[i], report.estimates[i] + 1.96 * se.se[i]);
  report.warnings.insert(report.warnings.end(), se.warnings.begin(), se.warnings.end());
}

}  // namespace detail

inline StdErrorResult std_errors(const UgdgeParams& est, const UniDataset& data) {
  return detail::numeric_std_errors(to_vector(est), [&](const std::vector<double>& v) {
    try {
      return observed_loglik_uni(uni_from_vector(v), data);
    } catch (const Error&) {
      return kNaN;
    }
  });
}

inline StdErrorResult std_errors(const BgdgeParams& est, const BivDataset& data) {
  return detail::numeric_std_errors(to_vector(est), [&](const std::vector<double>& v) {
    try {
      return observed_loglik_biv(biv_from_vector(v), data);
    } catch (const Error&) {
      return kNaN;
    }
  });
}

// ---------------------------------------------------------------------------
// Fits

namespace detail {

inline FitReport make_report(ModelKind model, const std::vector<double>& init, const EmRun& run) {
  FitReport r;
  r.model = model;
  r.names = parameter_names(model);
  r.init = init;
  r.estimates = run.params;
  r.loglik = run.loglik;
  r.iters = run.iters;
  r.em_maps = run.maps;
  r.stop_reason = run.reason;
  r.converged = run.reason != StopReason::MaxIter;
  r.ll_trace = run.trace;
  r.std_errors.assign(r.estimates.size(), kNaN);
  r.ci95.assign(r.estimates.size(), {kNaN, kNaN});
  return r;
}

/// Replaces an interior run by the theta = 1 fit when that fit is at least as likely.
inline void apply_boundary(FitReport& report, const std::vector<double>& boundary, double boundary_ll) {
  if (boundary_ll >= report.loglik) {
    report.estimates = boundary;
    report.ll_trace.push_back(boundary_ll);
    report.loglik = boundary_ll;
    report.theta_at_boundary = true;
    report.stop_reason = StopReason::Boundary;
    report.converged = true;
  }
}

inline DgeParams fit_dge(std::span<const WeightedObs> obs, const EmConfig& cfg, std::vector<std::string>* warnings) {
  const PairFit fit = m_step_pair(obs, cfg.pair_search());
  if (fit.boundary && warnings) warnings->push_back("theta = 1 fit: (alpha, p) maximizer on the search boundary");
  return DgeParams(fit.alpha, fit.p);
}

inline std::vector<WeightedObs> unit_obs(const std::vector<std::pair<std::int64_t, std::int64_t>>& counts) {
  std::vector<WeightedObs> obs;
  for (const auto& [x, c] : counts) obs.push_back({x, 1.0, static_cast<double>(c)});
  return obs;
}

}  // namespace detail

/// Maximum-likelihood DGE marginals with theta fixed at 1 (independence).
inline FitReport fit_theta_one_uni(const UniDataset& data, const EmConfig& cfg = {}) {
  data.validate();
  std::vector<std::string> warnings;
  const DgeParams d = detail::fit_dge(detail::unit_obs(data.counts()), cfg, &warnings);
  detail::EmRun run;
  run.params = {d.alpha(), d.p(), 1.0};
  run.loglik = observed_loglik_uni(UgdgeParams(d, 1.0), data);
  run.trace = {run.loglik};
  run.iters = 1;
  run.reason = StopReason::Boundary;
  FitReport r = detail::make_report(ModelKind::Univariate, run.params, run);
  r.theta_at_boundary = true;
  r.warnings = warnings;
  if (cfg.compute_se) detail::attach_std_errors(r, std_errors(uni_params(r), data));
  return r;
}

inline FitReport fit_theta_one_biv(const BivDataset& data, const EmConfig& cfg = {}) {
  data.validate();
  std::vector<std::string> warnings;
  const DgeParams d1 = detail::fit_dge(detail::unit_obs(data.column(Axis::X).counts()), cfg, &warnings);
  const DgeParams d2 = detail::fit_dge(detail::unit_obs(data.column(Axis::Y).counts()), cfg, &warnings);
  detail::EmRun run;
  run.params = {d1.alpha(), d1.p(), d2.alpha(), d2.p(), 1.0};
  run.loglik = observed_loglik_biv(BgdgeParams(d1, d2, 1.0), data);
  run.trace = {run.loglik};
  run.iters = 1;
  run.reason = StopReason::Boundary;
  FitReport r = detail::make_report(ModelKind::Bivariate, run.params, run);
  r.theta_at_boundary = true;
  r.warnings = warnings;
  if (cfg.compute_se) detail::attach_std_errors(r, std_errors(biv_params(r), data));
  return r;
}

/// Shared (alpha, p) for both coordinates with theta = 1.
inline FitReport fit_theta_one_equal(const BivDataset& data, const EmConfig& cfg = {}) {
  data.validate();
  std::vector<std::string> warnings;
  std::vector<WeightedObs> pooled = detail::unit_obs(data.column(Axis::X).counts());
  const std::vector<WeightedObs> second = detail::unit_obs(data.column(Axis::Y).counts());
  pooled.insert(pooled.end(), second.begin(), second.end());
  const DgeParams d = detail::fit_dge(consolidate(pooled), cfg, &warnings);
  detail::EmRun run;
  run.params = {d.alpha(), d.p(), 1.0};
  run.loglik = observed_loglik_biv(BgdgeParams(d, d, 1.0), data);
  run.trace = {run.loglik};
  run.iters = 1;
  run.reason = StopReason::Boundary;
  FitReport r = detail::make_report(ModelKind::BivariateEqualMarginals, run.params, run);
  r.theta_at_boundary = true;
  r.warnings = warnings;
  return r;
}

/// EM for UGDGE(alpha, p, theta).
inline FitReport em_fit_uni(const UniDataset& data, const UgdgeParams& init, const EmConfig& cfg = {}) {
  cfg.validate();
  data.validate();
  const auto cells = data.counts();
  const double m = static_cast<double>(data.size());
  std::vector<std::string> warnings;
  const std::vector<double> start = {init.alpha(), init.p(), detail::clamp_initial_theta(init.theta(), cfg)};
  auto em_map = [&](const std::vector<double>& v) {
    const UgdgeParams cur = uni_from_vector(v);
    const detail::LatentSummary s = detail::summarize(cur, cells, cfg);
    const DgeParams d = detail::improve_pair(s.first, cur.base(), cfg, &warnings);
    return std::vector<double>{d.alpha(), d.p(), detail::theta_update(m, s.total_count, cfg)};
  };
  auto loglik = [&](const std::vector<double>& v) { return observed_loglik_uni(uni_from_vector(v), data); };
  const detail::EmRun run =
      detail::run_em(start, em_map, loglik, {detail::Coord::Positive, detail::Coord::Unit, detail::Coord::Theta}, cfg);
  FitReport report = detail::make_report(ModelKind::Univariate, to_vector(init), run);
  const FitReport boundary = fit_theta_one_uni(data, [&] { EmConfig c = cfg; c.compute_se = false; return c; }());
  detail::apply_boundary(report, boundary.estimates, boundary.loglik);
  detail::note_theta_floor(report, cfg);
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
  if (cfg.compute_se) detail::attach_std_errors(report, std_errors(uni_params(report), data));
  return report;
}

/// EM for BGDGE(alpha1, alpha2, p1, p2, theta).
inline FitReport em_fit_biv(const BivDataset& data, const BgdgeParams& init, const EmConfig& cfg = {}) {
  cfg.validate();
  data.validate();
  const auto cells = data.contingency();
  const double m = static_cast<double>(data.size());
  std::vector<std::string> warnings;
  std::vector<double> start = to_vector(init);
  start[4] = detail::clamp_initial_theta(start[4], cfg);
  auto em_map = [&](const std::vector<double>& v) {
    const BgdgeParams cur = biv_from_vector(v);
    const detail::LatentSummary s = detail::summarize(cur, cells, cfg);
    const DgeParams d1 = detail::improve_pair(s.first, cur.m1(), cfg, &warnings);
    const DgeParams d2 = detail::improve_pair(s.second, cur.m2(), cfg, &warnings);
    return std::vector<double>{d1.alpha(), d1.p(), d2.alpha(), d2.p(), detail::theta_update(m, s.total_count, cfg)};
  };
  auto loglik = [&](const std::vector<double>& v) { return observed_loglik_biv(biv_from_vector(v), data); };
  using detail::Coord;
  const detail::EmRun run =
      detail::run_em(start, em_map, loglik, {Coord::Positive, Coord::Unit, Coord::Positive, Coord::Unit, Coord::Theta}, cfg);
  FitReport report = detail::make_report(ModelKind::Bivariate, to_vector(init), run);
  const FitReport boundary = fit_theta_one_biv(data, [&] { EmConfig c = cfg; c.compute_se = false; return c; }());
  detail::apply_boundary(report, boundary.estimates, boundary.loglik);
  detail::note_theta_floor(report, cfg);
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
  if (cfg.compute_se) detail::attach_std_errors(report, std_errors(biv_params(report), data));
  return report;
}

/// EM under alpha1 = alpha2, p1 = p2: the M-step pools both coordinates' terms.
inline FitReport em_fit_biv_equal(const BivDataset& data, const UgdgeParams& init, const EmConfig& cfg = {}) {
  cfg.validate();
  data.validate();
  const auto cells = data.contingency();
  const double m = static_cast<double>(data.size());
  std::vector<std::string> warnings;
  const std::vector<double> start = {init.alpha(), init.p(), detail::clamp_initial_theta(init.theta(), cfg)};
  auto em_map = [&](const std::vector<double>& v) {
    const BgdgeParams cur = biv_from_vector(v);
    detail::LatentSummary s = detail::summarize(cur, cells, cfg);
    s.first.insert(s.first.end(), s.second.begin(), s.second.end());
    const std::vector<WeightedObs> pooled = consolidate(std::move(s.first));
    const DgeParams d = detail::improve_pair(pooled, cur.m1(), cfg, &warnings);
    return std::vector<double>{d.alpha(), d.p(), detail::theta_update(m, s.total_count, cfg)};
  };
  auto loglik = [&](const std::vector<double>& v) { return observed_loglik_biv(biv_from_vector(v), data); };
  using detail::Coord;
  const detail::EmRun run = detail::run_em(start, em_map, loglik, {Coord::Positive, Coord::Unit, Coord::Theta}, cfg);
  FitReport report = detail::make_report(ModelKind::BivariateEqualMarginals, to_vector(init), run);
  const FitReport boundary = fit_theta_one_equal(data, cfg);
  detail::apply_boundary(report, boundary.estimates, boundary.loglik);
  detail::note_theta_floor(report, cfg);
  std::sort(warnings.begin(), warnings.end());
  warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
  report.warnings.insert(report.warnings.end(), warnings.begin(), warnings.end());
  return report;
}

/// (alpha, p) from the theta = 1 fit, theta = 0.5.
inline UgdgeParams default_init_uni(const UniDataset& data, const EmConfig& cfg = {}) {
  const DgeParams d = detail::fit_dge(detail::unit_obs(data.counts()), cfg, nullptr);
  return UgdgeParams(d, 0.5);
}

/// Marginal univariate fits supply (alpha_k, p_k); theta is the mean of the two marginal thetas.
inline BgdgeParams default_init_biv(const BivDataset& data, const EmConfig& cfg = {}) {
  EmConfig c = cfg;
  c.compute_se = false;
  const UniDataset xs = data.column(Axis::X);
  const UniDataset ys = data.column(Axis::Y);
  const FitReport fx = em_fit_uni(xs, default_init_uni(xs, c), c);
  const FitReport fy = em_fit_uni(ys, default_init_uni(ys, c), c);
  const UgdgeParams ux = uni_params(fx), uy = uni_params(fy);
  return BgdgeParams(ux.base(), uy.base(), 0.5 * (ux.theta() + uy.theta()));
}

}  // namespace gdge
