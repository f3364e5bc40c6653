#include "slr/experiments.hpp"

#include "slr/geometry.hpp"
#include "slr/ising.hpp"
#include "slr/operator_norm.hpp"
#include "slr/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace slr {

using io::Json;
using io::ValidationError;

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (d < 2 || d > kEnumerationCap) {
    throw ValidationError("d", "must be in [2, " + std::to_string(kEnumerationCap) + "]");
  }
  if (l < 1) throw ValidationError("l", "must be >= 1");
  if (n_grid.empty()) throw ValidationError("n_grid", "must be non-empty");
  for (std::size_t n : n_grid)
    if (n == 0) throw ValidationError("n_grid", "sample sizes must be >= 1");
  if (!(support_density >= 0 && support_density <= 1)) {
    throw ValidationError("support_density", "must be in [0, 1]");
  }
  if (!(s_lo > 0 && s_lo <= s_hi)) throw ValidationError("s_magnitude_range", "need 0 < lo <= hi");
  if (!(r_scale >= 0)) throw ValidationError("r_scale", "must be >= 0");
  if (!(lambda_rule.c2_scale > 0)) throw ValidationError("lambda_rule.c2_scale", "must be > 0");
  if (!(lambda_rule.kappa > 0)) throw ValidationError("lambda_rule.kappa", "must be > 0");
  if (gamma && !(*gamma > 0)) throw ValidationError("gamma", "must be > 0 or \"auto\"");
  if (seeds.empty()) throw ValidationError("seeds", "must be non-empty");
  if (!(thresholds.support_tol > 0)) throw ValidationError("thresholds.support_tol", "must be > 0");
  if (!(thresholds.rank_tol > 0)) throw ValidationError("thresholds.rank_tol", "must be > 0");
  if (!(nu > 0 && nu <= 0.5)) throw ValidationError("nu", "must be in (0, 0.5]");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError("solver", e.what());
  }
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  io::check_keys(j,
                 {"d", "l", "n_grid", "support_density", "s_magnitude_range", "r_scale", "lambda_rule", "gamma",
                  "seeds", "truth_seed", "solver", "thresholds", "nu", "population"},
                 "config");
  ExperimentConfig c;
  const std::string p = "config";
  if (j.contains("d")) c.d = static_cast<int>(io::get_integer(j, "d", p));
  if (j.contains("l")) c.l = static_cast<int>(io::get_integer(j, "l", p));
  if (j.contains("n_grid")) {
    const Json& g = j.at("n_grid");
    if (!g.is_array()) throw ValidationError("config.n_grid", "expected an array");
    c.n_grid.clear();
    for (const Json& v : g) {
      if (!v.is_number_integer() || v.get<long long>() < 1) {
        throw ValidationError("config.n_grid", "entries must be positive integers");
      }
      c.n_grid.push_back(static_cast<std::size_t>(v.get<long long>()));
    }
  }
  if (j.contains("support_density")) c.support_density = io::get_number(j, "support_density", p);
  if (j.contains("s_magnitude_range")) {
    const Json& r = j.at("s_magnitude_range");
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw ValidationError("config.s_magnitude_range", "expected [lo, hi]");
    }
    c.s_lo = r[0].get<double>();
    c.s_hi = r[1].get<double>();
  }
  if (j.contains("r_scale")) c.r_scale = io::get_number(j, "r_scale", p);
  if (j.contains("lambda_rule")) {
    const Json& r = j.at("lambda_rule");
    io::check_keys(r, {"c2_scale", "kappa"}, "config.lambda_rule");
    if (r.contains("c2_scale")) c.lambda_rule.c2_scale = io::get_number(r, "c2_scale", "config.lambda_rule");
    if (r.contains("kappa")) c.lambda_rule.kappa = io::get_number(r, "kappa", "config.lambda_rule");
  }
  if (j.contains("gamma")) {
    const Json& g = j.at("gamma");
    if (g.is_string() && g.get<std::string>() == "auto") {
      c.gamma.reset();
    } else if (g.is_number()) {
      c.gamma = g.get<double>();
    } else {
      throw ValidationError("config.gamma", "expected a number or \"auto\"");
    }
  }
  if (j.contains("seeds")) {
    const Json& s = j.at("seeds");
    if (!s.is_array()) throw ValidationError("config.seeds", "expected an array");
    c.seeds.clear();
    for (const Json& v : s) {
      if (!v.is_number_unsigned()) throw ValidationError("config.seeds", "entries must be non-negative integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (j.contains("solver")) c.solver = io::solver_config_from_json(j.at("solver"), "config.solver");
  if (j.contains("thresholds")) {
    const Json& t = j.at("thresholds");
    io::check_keys(t, {"support_tol", "rank_tol"}, "config.thresholds");
    if (t.contains("support_tol")) c.thresholds.support_tol = io::get_number(t, "support_tol", "config.thresholds");
    if (t.contains("rank_tol")) c.thresholds.rank_tol = io::get_number(t, "rank_tol", "config.thresholds");
  }
  if (j.contains("nu")) c.nu = io::get_number(j, "nu", p);
  if (j.contains("population")) c.population = io::get_bool(j, "population", p);
  if (j.contains("truth_seed")) {
    const Json& v = j.at("truth_seed");
    if (!v.is_number_unsigned()) throw ValidationError("config.truth_seed", "expected a non-negative integer");
    c.truth_seed = v.get<std::uint64_t>();
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    if (e.field().rfind("config", 0) == 0) throw;
    throw ValidationError("config." + e.field(), std::string(e.what()).substr(e.field().size() + 2));
  }
  return c;
}

Json experiment_config_to_json(const ExperimentConfig& c) {
  Json j;
  j["d"] = c.d;
  j["l"] = c.l;
  j["n_grid"] = c.n_grid;
  j["support_density"] = c.support_density;
  j["s_magnitude_range"] = {c.s_lo, c.s_hi};
  j["r_scale"] = c.r_scale;
  j["lambda_rule"] = {{"c2_scale", c.lambda_rule.c2_scale}, {"kappa", c.lambda_rule.kappa}};
  j["gamma"] = c.gamma ? Json(*c.gamma) : Json("auto");
  j["seeds"] = c.seeds;
  j["solver"] = io::solver_config_to_json(c.solver);
  j["thresholds"] = {{"support_tol", c.thresholds.support_tol}, {"rank_tol", c.thresholds.rank_tol}};
  j["nu"] = c.nu;
  j["population"] = c.population;
  if (c.truth_seed) j["truth_seed"] = *c.truth_seed;
  return j;
}

// ---------------------------------------------------------------------------
// Ground truth and metrics

GroundTruth generate_truth(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const int d = config.d;
  auto rng = derived_rng(seed, 0);
  std::bernoulli_distribution edge(config.support_density);
  std::bernoulli_distribution positive(0.5);
  std::uniform_real_distribution<double> magnitude(config.s_lo, config.s_hi);

  SymMat s(d);
  int edges = 0;
  for (int j = 0; j < d; ++j) {
    for (int i = j + 1; i < d; ++i) {
      if (!edge(rng)) continue;
      const double v = magnitude(rng);
      s.set(i, j, positive(rng) ? v : -v);
      ++edges;
    }
  }
  bool forced = false;
  if (edges == 0 && config.support_density > 0) {
    const int pairs = d * (d - 1) / 2;
    int pick = std::uniform_int_distribution<int>(0, pairs - 1)(rng);
    for (int j = 0; j < d && pick >= 0; ++j) {
      for (int i = j + 1; i < d; ++i, --pick) {
        if (pick == 0) {
          const double v = magnitude(rng);
          s.set(i, j, positive(rng) ? v : -v);
        }
      }
    }
    edges = 1;
    forced = true;
  }

  Eigen::MatrixXd r(config.l, d);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < config.l; ++k)
    for (int i = 0; i < d; ++i) r(k, i) = config.r_scale * normal(rng);

  LatentCGModel model(s, r, SymMat::identity(config.l));
  SymMat l_star = marginal_interaction(model);
  return {std::move(s), std::move(model), std::move(l_star), edges, config.support_density == 0.0, forced};
}

namespace {

int count_above(const Eigen::VectorXd& ev, double cut) {
  int k = 0;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cut) ++k;
  return k;
}

}  // namespace

RecoveryMetrics recovery_metrics(const SparseLowRankPair& estimate, const SymMat& s_star, const SymMat& l_star,
                                 double gamma, const RecoveryThresholds& thresholds) {
  s_star.check_same_dim(estimate.s());
  RecoveryMetrics m;
  int tp = 0, fp = 0, fn = 0;
  for (Index j = 0; j < s_star.dim(); ++j) {
    for (Index i = j + 1; i < s_star.dim(); ++i) {
      const bool truth = s_star(i, j) != 0.0;
      const bool est = std::abs(estimate.s()(i, j)) > thresholds.support_tol;
      if (truth && est) {
        ++tp;
        if ((s_star(i, j) > 0) != (estimate.s()(i, j) > 0)) m.sign_consistent = false;
      } else if (est) {
        ++fp;
      } else if (truth) {
        ++fn;
      }
    }
  }
  m.support_precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
  m.support_recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;

  const Eigen::VectorXd ev_true = eigenvalues(l_star);
  m.rank_true = count_above(ev_true, 1e-9 * std::max(1.0, ev_true.cwiseAbs().maxCoeff()));
  m.rank_est = count_above(eigenvalues(estimate.l()), thresholds.rank_tol);
  m.rank_match = m.rank_true == m.rank_est;
  m.gamma_norm_error = gamma_norm(estimate.s() - s_star, estimate.l() - l_star, gamma);
  m.spectral_error_compound = spectral_norm(estimate.theta() - (s_star + l_star));
  return m;
}

double xi_hat(const SymMat& l_star) {
  const LowRankBasis basis = lowrank_tangent(l_star, 1e-9);
  if (basis.rank() == 0) return 1.0;
  return std::min(1.0, 2.0 * coherence(basis));
}

double lambda_schedule(const LambdaRule& rule, int d, std::size_t n, double xi) {
  if (!(xi > 0)) throw std::invalid_argument("lambda_schedule: xi must be > 0");
  if (n == 0) throw std::invalid_argument("lambda_schedule: n must be >= 1");
  const double dd = d;
  return rule.c2_scale / xi * std::sqrt(rule.kappa * dd * std::log(dd) / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Geometry report

namespace {

GammaRange gamma_range_or_unbounded(double alpha, double beta, double nu, double xi, double mu) {
  if (mu > 0) return gamma_range(alpha, beta, nu, xi, mu);
  GammaRange g = gamma_range(alpha, beta, nu, xi, 1.0);
  g.gamma_max = std::numeric_limits<double>::infinity();
  g.feasible = true;
  g.product = 0.0;
  return g;
}

}  // namespace

GeometryReport geometry_report(const SymMat& s_star, const SymMat& l_star, const DiagnoseOptions& opt) {
  s_star.check_same_dim(l_star);
  GeometryReport out;
  Json& j = out.json;

  const SupportSet omega = sparse_tangent(s_star, opt.zero_tol);
  const MuOmega mu = mu_omega(omega, 20, 4096, opt.seed);
  const double mu_value = mu.exact.value_or(mu.upper);
  j["omega"] = {{"support_size", omega.size()}, {"max_degree", omega.max_degree()}, {"mu", io::mu_to_json(mu)}};

  const LowRankBasis basis = lowrank_tangent(l_star, opt.zero_tol);
  const XiBracket xi = xi_t(basis, opt.restarts, opt.seed);
  j["t"] = {{"rank", basis.rank()},
            {"coherence", basis.rank() > 0 ? coherence(basis) : 0.0},
            {"xi_lower", xi.lower},
            {"xi_upper", xi.upper}};
  j["nu"] = opt.nu;

  if (opt.stability) {
    check_enumerable(static_cast<int>(s_star.dim()));
    const SymMat theta = s_star + l_star;
    const LinearMap hessian = [&theta](const SymMat& m) { return hessian_vector_product(theta, m); };
    const StabilityEstimates est =
        stability_estimates(hessian, {omega, basis}, opt.epsilon, opt.sample_count, opt.restarts, opt.seed, l_star);
    j["stability"] = io::stability_to_json(est);
    const double alpha = est.alpha();
    Json a1;
    a1["threshold"] = 1.0 - 2.0 * opt.nu;
    if (alpha > 0) {
      a1["ratio"] = est.delta() / alpha;
      a1["holds"] = est.delta() / alpha <= 1.0 - 2.0 * opt.nu;
    } else {
      a1["ratio"] = nullptr;
      a1["holds"] = false;
    }
    j["assumption_stability"] = a1;
    if (alpha > 0 && est.beta() > 0) {
      out.gamma_range = gamma_range_or_unbounded(alpha, est.beta(), opt.nu, xi.upper, mu_value);
      j["gamma_range"] = io::gamma_range_to_json(*out.gamma_range);
    } else {
      j["gamma_range"] = nullptr;
    }
  }

  if (opt.lambda_n) {
    const GapCheck gap = gap_check(s_star, l_star, *opt.lambda_n, mu_value > 0 ? mu_value : 1.0, xi.upper, opt.c_s,
                                   opt.c_l, opt.zero_tol);
    j["gap"] = io::gap_check_to_json(gap);
    j["gap"]["lambda_n"] = *opt.lambda_n;
    j["gap"]["c_s"] = opt.c_s;
    j["gap"]["c_l"] = opt.c_l;
  }
  return out;
}

double auto_gamma(const std::optional<GammaRange>& range) {
  if (!range || !range->feasible) return 1.0;
  if (!(range->gamma_min > 0) || !std::isfinite(range->gamma_max)) return 1.0;
  return std::sqrt(range->gamma_min * range->gamma_max);
}

// ---------------------------------------------------------------------------
// Single runs and sweeps

namespace {

struct PreparedTruth {
  GroundTruth truth;
  SymMat theta;
  SymMat phi_star;
  double xi = 1.0;
  double gamma = 1.0;
  std::string gamma_source;
  Json geometry;
};

PreparedTruth prepare(const ExperimentConfig& config, std::uint64_t seed) {
  seed = config.truth_seed.value_or(seed);
  GroundTruth truth = generate_truth(config, seed);
  SymMat theta = truth.s_star + truth.l_star;
  SymMat phi_star = expected_second_moment(theta);
  const double xi = xi_hat(truth.l_star);
  DiagnoseOptions opt;
  opt.nu = config.nu;
  opt.seed = seed;
  opt.stability = !config.gamma.has_value();
  GeometryReport geo = geometry_report(truth.s_star, truth.l_star, opt);
  double gamma = 1.0;
  std::string source;
  if (config.gamma) {
    gamma = *config.gamma;
    source = "config";
  } else {
    gamma = auto_gamma(geo.gamma_range);
    source = geo.gamma_range && gamma != 1.0 ? "auto: geometric mean of gamma range" : "auto: fallback 1";
  }
  return {std::move(truth), std::move(theta), std::move(phi_star), xi, gamma, source, std::move(geo.json)};
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t n) {
  return derived_rng(seed, (std::uint64_t{1} << 32) + n)();
}

SingleRun run_prepared(const ExperimentConfig& config, const PreparedTruth& prep, std::size_t n,
                       std::uint64_t seed) {
  SingleRun run;
  run.n = n;
  run.seed = seed;
  run.gamma = prep.gamma;
  run.lambda_n = lambda_schedule(config.lambda_rule, config.d, n, prep.xi);
  const SymMat phi_n =
      config.population ? prep.phi_star : empirical_second_moment(exact_sample(prep.theta, n, sample_seed(seed, n)));
  const SolverResult fit = solve_slr(phi_n, run.lambda_n, run.gamma, config.solver);
  run.metrics = recovery_metrics(fit.estimate, prep.truth.s_star, prep.truth.l_star, run.gamma, config.thresholds);
  run.converged = fit.converged;
  run.kkt_ok = fit.kkt.optimal;

  Json& diag = run.diagnostics;
  diag["n"] = n;
  diag["seed"] = seed;
  diag["truth"] = {{"seed", config.truth_seed.value_or(seed)},
                   {"edges", prep.truth.edges},
                   {"degenerate", prep.truth.degenerate},
                   {"forced_edge", prep.truth.forced_edge},
                   {"rank", run.metrics.rank_true}};
  diag["xi_hat"] = prep.xi;
  diag["lambda"] = run.lambda_n;
  diag["gamma"] = run.gamma;
  diag["gamma_source"] = prep.gamma_source;
  diag["support_tol"] = config.thresholds.support_tol;
  diag["rank_tol"] = config.thresholds.rank_tol;
  diag["solver"] = {{"objective", fit.objective},
                    {"iterations", fit.iterations},
                    {"converged", fit.converged},
                    {"kkt", io::kkt_to_json(fit.kkt)}};
  diag["metrics"] = {{"support_precision", run.metrics.support_precision},
                     {"support_recall", run.metrics.support_recall},
                     {"sign_consistent", run.metrics.sign_consistent},
                     {"rank_true", run.metrics.rank_true},
                     {"rank_est", run.metrics.rank_est},
                     {"rank_match", run.metrics.rank_match},
                     {"gamma_norm_error", run.metrics.gamma_norm_error},
                     {"spectral_error_compound", run.metrics.spectral_error_compound},
                     {"recovered", run.metrics.recovered()}};
  diag["geometry"] = prep.geometry;
  return run;
}

std::string csv_bool(bool b) { return b ? "1" : "0"; }

}  // namespace

SingleRun run_single(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
  config.validate();
  return run_prepared(config, prepare(config, seed), n, seed);
}

SweepTable consistency_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<std::size_t> grid = config.n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::map<std::pair<std::size_t, std::uint64_t>, SingleRun> runs;
  std::optional<PreparedTruth> shared;
  if (config.truth_seed) shared = prepare(config, *config.truth_seed);
  for (std::uint64_t seed : seeds) {
    const PreparedTruth prep = shared ? *shared : prepare(config, seed);
    for (std::size_t n : grid) runs.emplace(std::make_pair(n, seed), run_prepared(config, prep, n, seed));
  }

  SweepTable table;
  for (auto& [key, run] : runs) table.rows.push_back(std::move(run));
  for (std::size_t n : grid) {
    std::vector<double> errors, lambdas;
    int recovered = 0;
    for (const SingleRun& r : table.rows) {
      if (r.n != n) continue;
      errors.push_back(r.metrics.gamma_norm_error);
      lambdas.push_back(r.lambda_n);
      if (r.metrics.recovered()) ++recovered;
    }
    table.aggregates.push_back(
        {n, median(errors), static_cast<double>(recovered) / static_cast<double>(errors.size()), median(lambdas)});
  }
  if (grid.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& a : table.aggregates) {
      x.push_back(static_cast<double>(a.n));
      y.push_back(a.median_gamma_norm_error);
    }
    table.slope = loglog_slope(x, y);
  }
  return table;
}

std::string SweepTable::rows_csv() const {
  std::string out = "n,seed,lambda,gamma,precision,recall,sign_ok,rank_true,rank_est,gnorm_err,kkt_ok\n";
  for (const SingleRun& r : rows) {
    out += std::to_string(r.n) + ',' + std::to_string(r.seed) + ',' + io::format_number(r.lambda_n) + ',' +
           io::format_number(r.gamma) + ',' + io::format_number(r.metrics.support_precision) + ',' +
           io::format_number(r.metrics.support_recall) + ',' + csv_bool(r.metrics.sign_consistent) + ',' +
           std::to_string(r.metrics.rank_true) + ',' + std::to_string(r.metrics.rank_est) + ',' +
           io::format_number(r.metrics.gamma_norm_error) + ',' + csv_bool(r.kkt_ok) + '\n';
  }
  return out;
}

std::string SweepTable::aggregates_csv() const {
  std::string out = "n,median_lambda,median_gnorm_err,recovery_rate\n";
  for (const auto& a : aggregates) {
    out += std::to_string(a.n) + ',' + io::format_number(a.median_lambda) + ',' +
           io::format_number(a.median_gamma_norm_error) + ',' + io::format_number(a.recovery_rate) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradient concentration

ConcentrationTable concentration_experiment(const SymMat& theta, const std::vector<std::size_t>& n_grid, int trials,
                                            std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("concentration_experiment: trials must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("concentration_experiment: empty n grid");
  check_enumerable(static_cast<int>(theta.dim()));
  const SymMat phi_star = expected_second_moment(theta);
  const ExactSampler sampler(theta);

  ConcentrationTable table;
  table.trials = trials;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const std::size_t n = n_grid[k];
    if (n == 0) throw std::invalid_argument("concentration_experiment: sample sizes must be >= 1");
    ConcentrationRow row;
    row.n = n;
    for (int t = 0; t < trials; ++t) {
      auto rng = derived_rng(seed, static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(trials) +
                                       static_cast<std::uint64_t>(t));
      BinaryDataset data(static_cast<int>(theta.dim()));
      data.reserve(n);
      for (std::size_t i = 0; i < n; ++i) data.push_back(sampler.draw(rng));
      row.values.push_back(spectral_norm(empirical_second_moment(data) - phi_star));
    }
    row.median = median(row.values);
    row.p90 = quantile(row.values, 0.9);
    table.rows.push_back(std::move(row));
  }
  if (table.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : table.rows) {
      x.push_back(static_cast<double>(r.n));
      y.push_back(r.median);
    }
    table.slope = loglog_slope(x, y);
  }
  return table;
}

std::string ConcentrationTable::csv() const {
  std::string out = trials == 1 ? "n,value\n" : "n,trials,median,p90\n";
  for (const auto& r : rows) {
    if (trials == 1) {
      out += std::to_string(r.n) + ',' + io::format_number(r.values.front()) + '\n';
    } else {
      out += std::to_string(r.n) + ',' + std::to_string(trials) + ',' + io::format_number(r.median) + ',' +
             io::format_number(r.p90) + '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0, my = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw std::invalid_argument("loglog_slope: values must be positive");
    mx += std::log(x[i]) / k;
    my += std::log(y[i]) / k;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw std::invalid_argument("loglog_slope: x values are all equal");
  return sxy / sxx;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("quantile: q must be in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace slr
