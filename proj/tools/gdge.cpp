#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gdge.hpp"

namespace {

using namespace gdge;

enum Exit { kOk = 0, kInput = 2, kNumeric = 3, kNotConverged = 4 };

enum class Mode { Auto, Uni, Biv };

struct Common {
  bool uni = false;
  bool biv = false;
  std::string out;
  int max_iter = EmConfig{}.max_iter;
  double tol = EmConfig{}.ll_rel_tol;
  std::string e_step = "posterior";
  double theta_min = EmConfig{}.theta_min;

  Mode mode() const {
    if (uni && biv) throw InputError("--uni and --biv are mutually exclusive");
    return uni ? Mode::Uni : biv ? Mode::Biv : Mode::Auto;
  }

  EmConfig config() const {
    EmConfig cfg;
    cfg.max_iter = max_iter;
    cfg.ll_rel_tol = tol;
    cfg.theta_min = theta_min;
    if (e_step == "posterior") cfg.e_step = EStepMode::Posterior;
    else if (e_step == "argmax") cfg.e_step = EStepMode::Argmax;
    else if (e_step == "expected") cfg.e_step = EStepMode::ExpectedCount;
    else throw InputError("unknown --e-step '" + e_step + "'");
    try {
      cfg.validate();
    } catch (const DomainError& e) {
      throw InputError(e.what());
    }
    return cfg;
  }
};

void add_common_fit_flags(CLI::App* cmd, Common& c) {
  cmd->add_flag("--uni", c.uni, "univariate model");
  cmd->add_flag("--biv", c.biv, "bivariate model");
  cmd->add_option("--out", c.out, "output file (default stdout)");
  cmd->add_option("--max-iter", c.max_iter, "EM iteration cap");
  cmd->add_option("--tol", c.tol, "relative log-likelihood tolerance");
  cmd->add_option("--e-step", c.e_step, "posterior | argmax | expected");
  cmd->add_option("--theta-min", c.theta_min, "lower clamp for theta during EM");
}

/// Writes to --out when given, else stdout.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
  std::ofstream file_;
};

/// The data file's shape decides the model unless --uni/--biv says otherwise.
struct Loaded {
  bool is_biv = false;
  UniDataset uni;
  BivDataset biv;
};

Loaded load(const std::string& path, Mode mode, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Loaded l;
  std::string text = buf.str();
  std::istringstream probe(text);
  const auto table = detail::read_count_csv(probe, path);
  const bool two = table.header.size() == 2;
  l.is_biv = mode == Mode::Biv || (mode == Mode::Auto && two && column.empty());
  std::istringstream again(text);
  if (l.is_biv) {
    if (!two) throw InputError(path + ": bivariate model needs header 'x,y'");
    l.biv = read_biv(again, path);
  } else {
    l.uni = read_uni(again, path, column.empty() ? "x" : column);
  }
  return l;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  return v;
}

UgdgeParams uni_params_arg(const std::string& s) {
  const auto v = parse_list(s, "--params");
  if (v.size() != 3) throw InputError("--params for the univariate model: alpha,p,theta");
  try {
    return uni_from_vector(v);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

BgdgeParams biv_params_arg(const std::string& s) {
  const auto v = parse_list(s, "--params");
  if (v.size() != 5) throw InputError("--params for the bivariate model: alpha1,p1,alpha2,p2,theta");
  try {
    return biv_from_vector(v);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

void header(Report& r, const char* command, const std::string& path, const Loaded& l) {
  r.add("command", command);
  r.add("data.path", path);
  r.add("data.model", l.is_biv ? "biv" : "uni");
  r.add("data.m", static_cast<unsigned long>(l.is_biv ? l.biv.size() : l.uni.size()));
}

// ---------------------------------------------------------------------------

struct FitArgs {
  Common c;
  std::string input;
  std::string column;
  std::string init;
  bool gof = false;
  double pool_min = GofOptions{}.pool_min;
  bool no_tail = false;
};

int cmd_fit(const FitArgs& a) {
  const Loaded l = load(a.input, a.c.mode(), a.column);
  const EmConfig cfg = a.c.config();
  Report r;
  header(r, "fit", a.input, l);
  add_config(r, cfg);
  GofOptions go;
  go.pool_min = a.pool_min;
  go.tail_cell = !a.no_tail;
  FitReport fit;
  if (l.is_biv) {
    const BgdgeParams init = a.init.empty() ? default_init_biv(l.biv, cfg) : biv_params_arg(a.init);
    r.add("init.rule", a.init.empty() ? "marginal_fits" : "user");
    fit = em_fit_biv(l.biv, init, cfg);
    add_fit(r, fit);
    if (a.gof) add_gof(r, gof_chisq_biv(l.biv, biv_params(fit), go));
  } else {
    const UgdgeParams init = a.init.empty() ? default_init_uni(l.uni, cfg) : uni_params_arg(a.init);
    r.add("init.rule", a.init.empty() ? "dge_fit_theta_half" : "user");
    fit = em_fit_uni(l.uni, init, cfg);
    add_fit(r, fit);
    if (a.gof) add_gof(r, gof_chisq_uni(l.uni, uni_params(fit), 3, go));
  }
  Sink out(a.c.out);
  r.write(out.stream());
  return fit.converged ? kOk : kNotConverged;
}

struct TestArgs {
  Common c;
  std::string input;
  std::string which = "both";
  std::string init;
};

int cmd_test(const TestArgs& a) {
  if (a.c.uni) throw InputError("test needs bivariate data");
  const Loaded l = load(a.input, Mode::Biv, "");
  const EmConfig cfg = a.c.config();
  if (a.which != "both" && a.which != "equal" && a.which != "independence")
    throw InputError("--test must be equal, independence or both");
  Report r;
  header(r, "test", a.input, l);
  add_config(r, cfg);
  const BgdgeParams init = a.init.empty() ? default_init_biv(l.biv, cfg) : biv_params_arg(a.init);
  bool converged = true;
  std::optional<TestResult> eq, ind;
  if (a.which != "independence") eq = test_equal_marginals(l.biv, cfg, init);
  if (a.which != "equal") ind = test_independence(l.biv, cfg, init);
  const FitReport& full = eq ? eq->full : ind->full;
  add_fit(r, full);
  converged = full.converged;
  if (eq) {
    add_test(r, *eq, "test.equal_marginals.");
    converged = converged && eq->null_fit.converged;
  }
  if (ind) add_test(r, *ind, "test.independence.");
  Sink out(a.c.out);
  r.write(out.stream());
  return converged ? kOk : kNotConverged;
}

struct GofArgs {
  Common c;
  std::string input;
  std::string column;
  std::string params;
  double pool_min = GofOptions{}.pool_min;
  bool no_tail = false;
  int df = 0;
};

int cmd_gof(const GofArgs& a) {
  const Loaded l = load(a.input, a.c.mode(), a.column);
  const EmConfig cfg = a.c.config();
  Report r;
  header(r, "gof", a.input, l);
  GofOptions go;
  go.pool_min = a.pool_min;
  go.tail_cell = !a.no_tail;
  if (a.df > 0) go.df_override = a.df;
  r.add("gof.pool_min", go.pool_min);
  r.add("gof.tail_cell", go.tail_cell);
  bool converged = true;
  if (l.is_biv) {
    BgdgeParams p = a.params.empty() ? BgdgeParams(1, 0.5, 1, 0.5, 1) : biv_params_arg(a.params);
    if (a.params.empty()) {
      const FitReport fit = em_fit_biv(l.biv, default_init_biv(l.biv, cfg), cfg);
      add_fit(r, fit);
      converged = fit.converged;
      p = biv_params(fit);
    }
    r.add("gof.params", a.params.empty() ? "fitted" : "user");
    add_gof(r, gof_chisq_biv(l.biv, p, go));
  } else {
    UgdgeParams p = a.params.empty() ? UgdgeParams(1, 0.5, 1) : uni_params_arg(a.params);
    if (a.params.empty()) {
      const FitReport fit = em_fit_uni(l.uni, default_init_uni(l.uni, cfg), cfg);
      add_fit(r, fit);
      converged = fit.converged;
      p = uni_params(fit);
    }
    r.add("gof.params", a.params.empty() ? "fitted" : "user");
    add_gof(r, gof_chisq_uni(l.uni, p, 3, go));
  }
  Sink out(a.c.out);
  r.write(out.stream());
  return converged ? kOk : kNotConverged;
}

struct TableArgs {
  bool uni = false;
  bool biv = false;
  std::string params;
  std::int64_t horizon = 20;
  std::int64_t horizon_y = -1;
  std::string out;
};

int cmd_table(const TableArgs& a) {
  if (a.uni && a.biv) throw InputError("--uni and --biv are mutually exclusive");
  Sink out(a.out);
  if (a.horizon < 0) throw InputError("--horizon must be nonnegative");
  if (a.biv) write_biv_table(out.stream(), biv_params_arg(a.params), a.horizon, a.horizon_y < 0 ? a.horizon : a.horizon_y);
  else write_uni_table(out.stream(), uni_params_arg(a.params), a.horizon);
  return kOk;
}

struct SampleArgs {
  bool uni = false;
  bool biv = false;
  std::string params;
  std::int64_t count = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_sample(const SampleArgs& a) {
  if (a.uni && a.biv) throw InputError("--uni and --biv are mutually exclusive");
  if (a.count < 0) throw InputError("--count must be nonnegative");
  Engine g(a.seed);
  Sink out(a.out);
  std::vector<std::string> comments = {"seed=" + std::to_string(a.seed), "params=" + a.params};
  if (a.biv) {
    const BgdgeParams p = biv_params_arg(a.params);
    BivDataset d;
    for (std::int64_t i = 0; i < a.count; ++i) d.pairs.push_back(bgdge_sample(p, g));
    write_dataset(out.stream(), d, comments);
  } else {
    const UgdgeParams p = uni_params_arg(a.params);
    UniDataset d;
    for (std::int64_t i = 0; i < a.count; ++i) d.values.push_back(ugdge_sample(p, g));
    write_dataset(out.stream(), d, comments);
  }
  return kOk;
}

struct SimulateArgs {
  Common c;
  std::string params = "2,0.25,2,0.25,0.25";
  std::string sizes = "25,50,75,100";
  int reps = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string init = "default";
};

int cmd_simulate(const SimulateArgs& a) {
  SimSpec spec;
  spec.truth = biv_params_arg(a.params);
  for (double n : parse_list(a.sizes, "--sizes")) {
    if (n != static_cast<double>(static_cast<std::int64_t>(n)) || n < 2) throw InputError("--sizes must be integers >= 2");
    spec.sample_sizes.push_back(static_cast<std::int64_t>(n));
  }
  if (a.reps < 1) throw InputError("--reps must be at least 1");
  spec.replications = a.reps;
  spec.seed = a.seed;
  spec.threads = a.threads;
  spec.cfg = a.c.config();
  if (a.init == "default") spec.init = SimInit::Default;
  else if (a.init == "truth") spec.init = SimInit::Truth;
  else throw InputError("--init must be default or truth");
  const SimTable t = run_simulation(spec);
  Report r;
  r.add("command", "simulate");
  r.add("sim.seed", static_cast<unsigned long long>(a.seed));
  r.add("sim.seed_stream", "splitmix64(seed, n, replication)");
  r.add("sim.replications", a.reps);
  r.add("sim.init", to_string(spec.init));
  add_config(r, spec.cfg);
  for (std::size_t k = 0; k < t.names.size(); ++k) r.add("truth." + t.names[k], t.truth[k]);
  for (const SimRow& row : t.rows) {
    const std::string pre = "n" + std::to_string(row.n) + ".";
    r.add(pre + "used", row.used);
    r.add(pre + "not_converged", row.not_converged);
    r.add(pre + "errors", row.errors);
    r.add(pre + "theta_at_boundary", row.at_boundary);
    for (std::size_t k = 0; k < t.names.size(); ++k) {
      r.add(pre + t.names[k] + ".ae", row.ae[k]);
      r.add(pre + t.names[k] + ".mse", row.mse[k]);
    }
  }
  Sink out(a.c.out);
  r.write(out.stream());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric discrete generalized exponential models: fitting, tests, tables, sampling"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "maximum-likelihood fit by EM");
  f->add_option("input", fit.input, "CSV with header x or x,y")->required();
  add_common_fit_flags(f, fit.c);
  f->add_option("--column", fit.column, "x or y: fit one column of a two-column file");
  f->add_option("--init", fit.init, "starting values, comma separated in report order");
  f->add_flag("--gof", fit.gof, "append a chi-square goodness-of-fit block");
  f->add_option("--pool-min", fit.pool_min, "pool cells until expected counts reach this");
  f->add_flag("--no-tail", fit.no_tail, "no tail cell beyond the largest observation");

  TestArgs test;
  auto* t = app.add_subcommand("test", "likelihood-ratio tests on bivariate data");
  t->add_option("input", test.input, "CSV with header x,y")->required();
  add_common_fit_flags(t, test.c);
  t->add_option("--test", test.which, "equal | independence | both");
  t->add_option("--init", test.init, "starting values for the full model");

  GofArgs gof;
  auto* g = app.add_subcommand("gof", "chi-square goodness of fit");
  g->add_option("input", gof.input, "CSV with header x or x,y")->required();
  add_common_fit_flags(g, gof.c);
  g->add_option("--column", gof.column, "x or y: use one column of a two-column file");
  g->add_option("--params", gof.params, "evaluate at these parameters instead of fitting");
  g->add_option("--pool-min", gof.pool_min, "pool cells until expected counts reach this (0: no pooling)");
  g->add_flag("--no-tail", gof.no_tail, "no tail cell / no tail folding");
  g->add_option("--df", gof.df, "degrees of freedom override");

  TableArgs table;
  auto* tb = app.add_subcommand("table", "pmf and cdf table as CSV");
  tb->add_flag("--uni", table.uni, "univariate model (default)");
  tb->add_flag("--biv", table.biv, "bivariate model");
  tb->add_option("--params", table.params, "alpha,p,theta or alpha1,p1,alpha2,p2,theta")->required();
  tb->add_option("--horizon", table.horizon, "largest x");
  tb->add_option("--horizon-y", table.horizon_y, "largest y (default: --horizon)");
  tb->add_option("--out", table.out, "output file (default stdout)");

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "draw a dataset");
  s->add_flag("--uni", sample.uni, "univariate model (default)");
  s->add_flag("--biv", sample.biv, "bivariate model");
  s->add_option("--params", sample.params, "alpha,p,theta or alpha1,p1,alpha2,p2,theta")->required();
  s->add_option("--count", sample.count, "number of rows");
  s->add_option("--seed", sample.seed, "generator seed");
  s->add_option("--out", sample.out, "output file (default stdout)");

  SimulateArgs sim;
  auto* sm = app.add_subcommand("simulate", "Monte Carlo study of the bivariate EM estimator");
  sm->add_option("--params", sim.params, "true alpha1,p1,alpha2,p2,theta");
  sm->add_option("--sizes", sim.sizes, "sample sizes, comma separated");
  sm->add_option("--reps", sim.reps, "replications per sample size");
  sm->add_option("--seed", sim.seed, "master seed");
  sm->add_option("--threads", sim.threads, "worker threads");
  sm->add_option("--init", sim.init, "default | truth");
  sm->add_option("--out", sim.c.out, "output file (default stdout)");
  sm->add_option("--max-iter", sim.c.max_iter, "EM iteration cap");
  sm->add_option("--tol", sim.c.tol, "relative log-likelihood tolerance");
  sm->add_option("--e-step", sim.c.e_step, "posterior | argmax | expected");
  sm->add_option("--theta-min", sim.c.theta_min, "lower clamp for theta during EM");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*f) return cmd_fit(fit);
    if (*t) return cmd_test(test);
    if (*g) return cmd_gof(gof);
    if (*tb) return cmd_table(table);
    if (*s) return cmd_sample(sample);
    if (*sm) return cmd_simulate(sim);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kInput;
}
