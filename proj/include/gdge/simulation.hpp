#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "gdge/bgdge.hpp"
#include "gdge/dataset.hpp"
#include "gdge/em.hpp"
#include "gdge/random.hpp"

namespace gdge {

enum class SimInit {
  Default,  ///< marginal univariate fits, averaged theta
  Truth,    ///< start at the generating parameters
};

inline const char* to_string(SimInit i) { return i == SimInit::Default ? "marginal_fits" : "truth"; }

struct SimSpec {
  BgdgeParams truth{1.0, 0.5, 1.0, 0.5, 0.5};
  std::vector<std::int64_t> sample_sizes;
  int replications = 1;
  std::uint64_t seed = 0;
  EmConfig cfg;
  SimInit init = SimInit::Default;
  unsigned threads = 1;

  void validate() const {
    if (replications < 1) throw DomainError("SimSpec: replications must be at least 1");
    if (sample_sizes.empty()) throw DomainError("SimSpec: no sample sizes");
    for (auto n : sample_sizes)
      if (n < 2) throw DomainError("SimSpec: sample sizes must be at least 2");
    cfg.validate();
  }
};

/// Per sample size: average estimate and MSE for each parameter over the usable replications.
struct SimRow {
  std::int64_t n = 0;
  std::vector<double> ae;
  std::vector<double> mse;
  int used = 0;
  int not_converged = 0;  ///< fits that hit max_iter, excluded
  int errors = 0;         ///< fits that threw, excluded
  int at_boundary = 0;    ///< theta estimated as 1 (kept)
};

struct SimTable {
  std::vector<std::string> names;
  std::vector<double> truth;
  std::vector<SimRow> rows;
};

/// One replication's dataset; the stream depends only on (seed, n, rep).
inline BivDataset simulate_dataset(const BgdgeParams& truth, std::int64_t n, std::uint64_t seed, std::uint64_t rep) {
  Engine g(derive_seed(seed, static_cast<std::uint64_t>(n), rep));
  BivDataset d;
  d.pairs.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) d.pairs.push_back(bgdge_sample(truth, g));
  return d;
}

namespace detail {

struct RepOutcome {
  enum class Kind { Ok, NotConverged, Error } kind = Kind::Error;
  std::vector<double> estimates;
  bool boundary = false;
};

inline RepOutcome run_replication(const SimSpec& spec, std::int64_t n, int rep) {
  RepOutcome out;
  try {
    const BivDataset d = simulate_dataset(spec.truth, n, spec.seed, static_cast<std::uint64_t>(rep));
    EmConfig cfg = spec.cfg;
    cfg.compute_se = false;
    const BgdgeParams init = spec.init == SimInit::Truth ? spec.truth : default_init_biv(d, cfg);
    const FitReport f = em_fit_biv(d, init, cfg);
    out.estimates = f.estimates;
    out.boundary = f.theta_at_boundary;
    out.kind = f.converged ? RepOutcome::Kind::Ok : RepOutcome::Kind::NotConverged;
  } catch (const Error&) {
    out.kind = RepOutcome::Kind::Error;
  }
  return out;
}

}  // namespace detail

inline SimTable run_simulation(const SimSpec& spec) {
  spec.validate();
  SimTable table;
  table.names = parameter_names(ModelKind::Bivariate);
  table.truth = to_vector(spec.truth);
  const std::size_t dim = table.truth.size();
  for (std::int64_t n : spec.sample_sizes) {
    std::vector<detail::RepOutcome> outcomes(static_cast<std::size_t>(spec.replications));
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int r; (r = next.fetch_add(1)) < spec.replications;) outcomes[static_cast<std::size_t>(r)] = detail::run_replication(spec, n, r);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(spec.replications)));
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    SimRow row;
    row.n = n;
    row.ae.assign(dim, 0.0);
    row.mse.assign(dim, 0.0);
    for (const auto& o : outcomes) {
      if (o.kind == detail::RepOutcome::Kind::Error) {
        ++row.errors;
        continue;
      }
      if (o.kind == detail::RepOutcome::Kind::NotConverged) {
        ++row.not_converged;
        continue;
      }
      ++row.used;
      if (o.boundary) ++row.at_boundary;
      for (std::size_t k = 0; k < dim; ++k) {
        row.ae[k] += o.estimates[k];
        const double e = o.estimates[k] - table.truth[k];
        row.mse[k] += e * e;
      }
    }
    for (std::size_t k = 0; k < dim; ++k) {
      row.ae[k] = row.used ? row.ae[k] / row.used : kNaN;
      row.mse[k] = row.used ? row.mse[k] / row.used : kNaN;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace gdge
