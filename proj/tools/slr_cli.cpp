// Command-line front end.
//
// Exit codes: 0 success, 1 invalid input or configuration, 2 a solver did
// not converge (outputs are still written).

#include "slr/experiments.hpp"
#include "slr/geometry.hpp"
#include "slr/io.hpp"
#include "slr/ising.hpp"
#include "slr/maxent.hpp"
#include "slr/sampler.hpp"
#include "slr/solver.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using slr::io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = ".";
  std::string format = "json";
};

Json load_json(const std::string& path) {
  const std::string text = slr::io::read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw slr::io::ValidationError(path, std::string("malformed JSON: ") + e.what());
  }
}

slr::SolverConfig load_solver_config(const Globals& g) {
  if (g.config.empty()) return {};
  return slr::io::solver_config_from_json(load_json(g.config), "solver");
}

slr::ExperimentConfig load_experiment_config(const Globals& g) {
  if (g.config.empty()) return {};
  return slr::experiment_config_from_json(load_json(g.config));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_matrix(const fs::path& dir, const std::string& stem, const slr::SymMat& m, const std::string& format) {
  if (format == "csv") {
    slr::io::write_text(dir / (stem + ".csv"), slr::io::matrix_to_csv(m.matrix()));
  } else {
    slr::io::write_text(dir / (stem + ".json"), dump(slr::io::matrix_to_json(m)));
  }
}

slr::SymMat moments_from(const std::string& data_path, const std::string& phi_path) {
  if (!data_path.empty() == !phi_path.empty()) {
    throw slr::io::ValidationError("--data/--phi", "give exactly one of a dataset or a moment matrix");
  }
  if (!phi_path.empty()) return slr::io::read_symmetric(phi_path);
  return slr::empirical_second_moment(slr::io::dataset_from_text(slr::io::read_text(data_path)));
}

std::vector<double> geometric_grid(double hi, double lo, int count) {
  if (!(hi > 0 && lo > 0 && lo <= hi)) throw slr::io::ValidationError("--lambda-max/--lambda-min", "need 0 < min <= max");
  if (count < 1) throw slr::io::ValidationError("--count", "must be >= 1");
  std::vector<double> grid;
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    grid.push_back(hi * std::pow(lo / hi, t));
  }
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse + low-rank Ising model estimation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed");
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--format", g.format, "Output format for tables and matrices")
      ->check(CLI::IsMember({"csv", "json"}));

  // generate
  auto* gen = app.add_subcommand("generate", "Ground truth and a sampled dataset");
  std::optional<std::size_t> gen_n;
  gen->add_option("--n", gen_n, "Sample size (default: first entry of n_grid)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit (S, L) to a dataset");
  std::string fit_data, fit_phi;
  double fit_lambda = 0, fit_gamma = 1;
  fit->add_option("--data", fit_data, "Dataset file (0/1 lines or CSV)");
  fit->add_option("--phi", fit_phi, "Second-moment matrix instead of a dataset");
  fit->add_option("--lambda", fit_lambda, "Regularization weight λ")->required();
  fit->add_option("--gamma", fit_gamma, "Trade-off γ");

  // path
  auto* path = app.add_subcommand("path", "Warm-started fits along a λ grid");
  std::string path_data, path_phi;
  std::vector<double> path_lambdas;
  std::optional<double> path_max, path_min;
  int path_count = 10;
  double path_gamma = 1;
  path->add_option("--data", path_data, "Dataset file");
  path->add_option("--phi", path_phi, "Second-moment matrix instead of a dataset");
  path->add_option("--lambdas", path_lambdas, "Explicit λ values")->delimiter(',');
  path->add_option("--lambda-max", path_max, "Largest λ (default: zero-solution threshold)");
  path->add_option("--lambda-min", path_min, "Smallest λ (default: λ_max / 100)");
  path->add_option("--count", path_count, "Grid size");
  path->add_option("--gamma", path_gamma, "Trade-off γ");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Tangent-space diagnostics of (S*, L*)");
  std::string diag_s, diag_l;
  slr::DiagnoseOptions dopt;
  bool diag_no_stability = false;
  diag->add_option("--s", diag_s, "Sparse matrix S*")->required();
  diag->add_option("--l", diag_l, "Low-rank matrix L*")->required();
  diag->add_option("--nu", dopt.nu, "ν in (0, 1/2]");
  diag->add_option("--epsilon", dopt.epsilon, "Twist radius for T-indexed constants");
  diag->add_option("--samples", dopt.sample_count, "Sampled nearby tangent spaces");
  diag->add_option("--restarts", dopt.restarts, "Restarts per local search");
  diag->add_option("--lambda", dopt.lambda_n, "λₙ for the gap check");
  diag->add_option("--c-s", dopt.c_s, "Gap constant C_S");
  diag->add_option("--c-l", dopt.c_l, "Gap constant C_L");
  diag->add_flag("--no-stability", diag_no_stability, "Skip the Hessian-based constants");

  // maxent-check
  auto* me = app.add_subcommand("maxent-check", "Duality check for the max-entropy problem");
  std::string me_data, me_phi;
  double me_c = 0, me_lambda = 0;
  bool me_one_sided = false;
  me->add_option("--data", me_data, "Dataset file");
  me->add_option("--phi", me_phi, "Second-moment matrix instead of a dataset");
  me->add_option("--c", me_c, "Entrywise tolerance c")->required();
  me->add_option("--lambda", me_lambda, "Spectral tolerance λ")->required();
  me->add_flag("--one-sided", me_one_sided, "Only the constraint Φⁿ − E[Φ] ⪯ λI");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Consistency sweep over the sample size");

  // concentration
  auto* conc = app.add_subcommand("concentration", "‖Φⁿ − Φ*‖ against n");
  std::string conc_theta;
  int conc_dim = 8;
  int conc_trials = 50;
  std::vector<std::size_t> conc_grid{100, 1000, 10000};
  conc->add_option("--theta", conc_theta, "Interaction matrix (default: zero)");
  conc->add_option("--dim", conc_dim, "Dimension when --theta is absent");
  conc->add_option("--n-grid", conc_grid, "Sample sizes")->delimiter(',');
  conc->add_option("--trials", conc_trials, "Trials per sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  const fs::path out(g.out);
  int code = kExitOk;
  try {
    if (*gen) {
      slr::ExperimentConfig cfg = load_experiment_config(g);
      const std::size_t n = gen_n.value_or(cfg.n_grid.front());
      if (n == 0) throw slr::io::ValidationError("--n", "must be >= 1");
      const slr::GroundTruth truth = slr::generate_truth(cfg, g.seed);
      const slr::SymMat theta = truth.s_star + truth.l_star;
      const slr::BinaryDataset data = slr::exact_sample(theta, n, g.seed);
      slr::io::write_text(out / "model.json", dump(slr::io::model_to_json(truth.model)));
      write_matrix(out, "s_star", truth.s_star, g.format);
      write_matrix(out, "l_star", truth.l_star, g.format);
      write_matrix(out, "theta", theta, g.format);
      slr::io::write_text(out / "data.txt", slr::io::dataset_to_text(data, g.format == "csv"
                                                                              ? slr::io::DatasetFormat::Csv
                                                                              : slr::io::DatasetFormat::Lines));
      Json info;
      info["seed"] = g.seed;
      info["n"] = n;
      info["edges"] = truth.edges;
      info["degenerate"] = truth.degenerate;
      info["forced_edge"] = truth.forced_edge;
      info["config"] = slr::experiment_config_to_json(cfg);
      slr::io::write_text(out / "truth.json", dump(info));
    } else if (*fit) {
      const slr::SolverConfig cfg = load_solver_config(g);
      if (!(fit_lambda > 0)) throw slr::io::ValidationError("--lambda", "must be > 0");
      if (!(fit_gamma > 0)) throw slr::io::ValidationError("--gamma", "must be > 0");
      const slr::SymMat phi = moments_from(fit_data, fit_phi);
      const slr::SolverResult r = slr::solve_slr(phi, fit_lambda, fit_gamma, cfg);
      slr::io::write_text(out / "result.json", dump(slr::io::solver_result_to_json(r, fit_lambda, fit_gamma)));
      if (g.format == "csv") {
        write_matrix(out, "S", r.estimate.s(), "csv");
        write_matrix(out, "L", r.estimate.l(), "csv");
      }
      if (!r.converged) code = kExitNotConverged;
    } else if (*path) {
      const slr::SolverConfig cfg = load_solver_config(g);
      if (!(path_gamma > 0)) throw slr::io::ValidationError("--gamma", "must be > 0");
      const slr::SymMat phi = moments_from(path_data, path_phi);
      std::vector<double> lambdas = path_lambdas;
      if (lambdas.empty()) {
        const auto zero = slr::zero_solution_threshold(phi);
        const double hi = path_max.value_or(std::max(zero.lambda, zero.lambda_gamma / path_gamma));
        lambdas = geometric_grid(hi, path_min.value_or(hi / 100.0), path_count);
      }
      const auto results = slr::solve_path(phi, lambdas, path_gamma, cfg);
      if (g.format == "csv") {
        slr::io::write_text(out / "path.csv", slr::io::path_to_csv(lambdas, path_gamma, results));
      } else {
        Json arr = Json::array();
        for (std::size_t k = 0; k < results.size(); ++k)
          arr.push_back(slr::io::solver_result_to_json(results[k], lambdas[k], path_gamma));
        slr::io::write_text(out / "path.json", dump(arr));
      }
      for (const auto& r : results)
        if (!r.converged) code = kExitNotConverged;
    } else if (*diag) {
      dopt.seed = g.seed;
      dopt.stability = !diag_no_stability;
      if (!(dopt.nu > 0 && dopt.nu <= 0.5)) throw slr::io::ValidationError("--nu", "must be in (0, 0.5]");
      if (!(dopt.epsilon >= 0)) throw slr::io::ValidationError("--epsilon", "must be >= 0");
      if (dopt.restarts < 1) throw slr::io::ValidationError("--restarts", "must be >= 1");
      if (dopt.lambda_n && !(*dopt.lambda_n > 0)) throw slr::io::ValidationError("--lambda", "must be > 0");
      const slr::SymMat s = slr::io::read_symmetric(diag_s);
      const slr::SymMat l = slr::io::read_symmetric(diag_l);
      if (s.dim() != l.dim()) throw slr::io::ValidationError("--s/--l", "dimensions differ");
      const auto report = slr::geometry_report(s, l, dopt);
      slr::io::write_text(out / "diagnostics.json", dump(report.json));
    } else if (*me) {
      const slr::SolverConfig cfg = load_solver_config(g);
      if (!(me_c > 0)) throw slr::io::ValidationError("--c", "must be > 0");
      if (!(me_lambda > 0)) throw slr::io::ValidationError("--lambda", "must be > 0");
      const slr::SymMat phi = moments_from(me_data, me_phi);
      const auto dual = me_one_sided ? slr::solve_one_sided_dual(phi, me_c, me_lambda, cfg)
                                     : slr::solve_two_sided_dual(phi, me_c, me_lambda, cfg);
      slr::DualityReport rep = slr::duality_report(dual.solution, phi, me_c, me_lambda, me_one_sided);
      rep.converged = dual.converged;
      Json j = slr::io::duality_report_to_json(rep);
      j["iterations"] = dual.iterations;
      j["kkt"] = slr::io::dual_kkt_to_json(dual.kkt);
      j["S"] = slr::io::matrix_to_json(dual.solution.s());
      j["L1"] = slr::io::matrix_to_json(dual.solution.l1());
      j["L2"] = slr::io::matrix_to_json(dual.solution.l2());
      if (me_one_sided) {
        const auto slr_fit = slr::solve_slr(phi, me_lambda, me_c / me_lambda, cfg);
        j["slr_objective"] = slr_fit.objective;
        j["slr_objective_gap"] = std::abs(slr_fit.objective + rep.dual_objective);
      }
      slr::io::write_text(out / "duality.json", dump(j));
      if (!dual.converged) code = kExitNotConverged;
    } else if (*sweep) {
      const slr::ExperimentConfig cfg = load_experiment_config(g);
      const slr::SweepTable table = slr::consistency_sweep(cfg);
      Json summary;
      summary["config"] = slr::experiment_config_to_json(cfg);
      summary["slope"] = table.slope ? Json(*table.slope) : Json(nullptr);
      Json aggs = Json::array();
      for (const auto& a : table.aggregates) {
        aggs.push_back({{"n", a.n},
                        {"median_lambda", a.median_lambda},
                        {"median_gnorm_err", a.median_gamma_norm_error},
                        {"recovery_rate", a.recovery_rate}});
      }
      summary["aggregates"] = aggs;
      if (g.format == "csv") {
        slr::io::write_text(out / "sweep.csv", table.rows_csv());
        slr::io::write_text(out / "sweep_summary.csv", table.aggregates_csv());
      } else {
        Json rows = Json::array();
        for (const auto& r : table.rows) rows.push_back(r.diagnostics);
        summary["runs"] = rows;
      }
      slr::io::write_text(out / "sweep.json", dump(summary));
      for (const auto& r : table.rows)
        if (!r.converged) code = kExitNotConverged;
    } else if (*conc) {
      slr::SymMat theta = conc_theta.empty() ? slr::SymMat(conc_dim) : slr::io::read_symmetric(conc_theta);
      if (conc_trials < 1) throw slr::io::ValidationError("--trials", "must be >= 1");
      for (std::size_t n : conc_grid)
        if (n == 0) throw slr::io::ValidationError("--n-grid", "sample sizes must be >= 1");
      const auto table = slr::concentration_experiment(theta, conc_grid, conc_trials, g.seed);
      if (g.format == "csv") {
        slr::io::write_text(out / "concentration.csv", table.csv());
      } else {
        Json j;
        j["trials"] = table.trials;
        j["slope"] = table.slope ? Json(*table.slope) : Json(nullptr);
        Json rows = Json::array();
        for (const auto& r : table.rows)
          rows.push_back({{"n", r.n}, {"median", r.median}, {"p90", r.p90}, {"values", r.values}});
        j["rows"] = rows;
        slr::io::write_text(out / "concentration.json", dump(j));
      }
    }
  } catch (const std::exception& e) {
    // ValidationError, invalid_argument and domain_error (enumeration cap)
    // all describe bad input.
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  if (code == kExitNotConverged) std::cerr << "warning: solver did not converge\n";
  return code;
}
