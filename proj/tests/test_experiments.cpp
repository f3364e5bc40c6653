#include "slr/experiments.hpp"
#include "slr/geometry.hpp"
#include "slr/ising.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace slr;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.d = 5;
  c.l = 1;
  c.n_grid = {500, 5000};
  c.support_density = 0.3;
  c.seeds = {1, 2};
  c.gamma = 0.5;
  return c;
}

// Fixed instance on which the regularized problem identifies (S*, L*).
ExperimentConfig benign_config() {
  ExperimentConfig c;
  c.r_scale = 0.5;
  c.truth_seed = 37;
  c.gamma = 0.5;
  c.seeds = {1};
  return c;
}

}  // namespace

TEST_CASE("generate_truth") {
  ExperimentConfig c;
  const GroundTruth t = generate_truth(c, 7);
  CHECK(t.s_star.dim() == 10);
  for (Index i = 0; i < 10; ++i) CHECK(t.s_star(i, i) == 0.0);
  int edges = 0;
  for (Index j = 0; j < 10; ++j)
    for (Index i = j + 1; i < 10; ++i)
      if (t.s_star(i, j) != 0.0) {
        ++edges;
        CHECK(std::abs(t.s_star(i, j)) >= c.s_lo);
        CHECK(std::abs(t.s_star(i, j)) <= c.s_hi);
      }
  CHECK(edges == t.edges);
  CHECK(t.l_star == marginal_interaction(t.model));
  CHECK(lowrank_tangent(t.l_star).rank() == 1);
  CHECK(t.model.lambda() == SymMat::identity(1));

  const GroundTruth again = generate_truth(c, 7);
  CHECK(again.s_star == t.s_star);
  CHECK(again.l_star == t.l_star);
  CHECK_FALSE(generate_truth(c, 8).s_star == t.s_star);
}

TEST_CASE("generate_truth edge cases") {
  ExperimentConfig c;
  c.support_density = 0.0;
  const GroundTruth none = generate_truth(c, 1);
  CHECK(none.degenerate);
  CHECK(none.edges == 0);
  CHECK(none.s_star == SymMat(10));

  c.support_density = 1e-6;
  const GroundTruth forced = generate_truth(c, 1);
  CHECK(forced.forced_edge);
  CHECK(forced.edges == 1);
  CHECK(sparse_tangent(forced.s_star, 0.0).size() == 2);

  c.support_density = 0.1;
  c.r_scale = 0.0;
  const GroundTruth flat = generate_truth(c, 1);
  CHECK(flat.l_star == SymMat(10));
  CHECK(lowrank_tangent(flat.l_star).rank() == 0);
}

TEST_CASE("edge counts concentrate at the binomial mean") {
  ExperimentConfig c;
  double total = 0.0;
  const int seeds = 400;
  for (int s = 0; s < seeds; ++s) total += generate_truth(c, std::uint64_t(s)).edges;
  // 45 pairs at density 0.1: mean 4.5, standard error of the average ≈ 0.1
  CHECK(std::abs(total / seeds - 4.5) < 0.5);
}

TEST_CASE("recovery_metrics") {
  SymMat s_star(4);
  s_star.set(0, 1, 1.0);
  s_star.set(2, 3, -0.5);
  const SymMat l_star = SymMat::unit(4, 0, 0);
  const RecoveryThresholds th;

  const RecoveryMetrics exact = recovery_metrics({s_star, l_star}, s_star, l_star, 0.5, th);
  CHECK(exact.recovered());
  CHECK(exact.rank_true == 1);
  CHECK(exact.gamma_norm_error == 0.0);

  SymMat s = s_star;
  s.set(1, 2, 0.2);        // false positive
  s.set(0, 0, 5.0);        // diagonal is ignored by the support metrics
  s.set(0, 2, 1e-4);       // below support_tol
  s.set(2, 3, 0.3);        // sign flip
  const SymMat l = 0.5 * SymMat::identity(4);
  const RecoveryMetrics m = recovery_metrics({s, l}, s_star, l_star, 0.5, th);
  CHECK(m.support_precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.support_recall == 1.0);
  CHECK_FALSE(m.sign_consistent);
  CHECK(m.rank_est == 4);
  CHECK_FALSE(m.rank_match);
  CHECK_FALSE(m.recovered());
  CHECK(m.gamma_norm_error == doctest::Approx(gamma_norm(s - s_star, l - l_star, 0.5)));
  CHECK(m.spectral_error_compound == doctest::Approx(spectral_norm(SymMat((s + l) - (s_star + l_star)))));

  const RecoveryMetrics empty = recovery_metrics(SparseLowRankPair::zero(4), s_star, l_star, 1.0, th);
  CHECK(empty.support_precision == 1.0);
  CHECK(empty.support_recall == 0.0);
  CHECK(empty.rank_est == 0);
}

TEST_CASE("lambda schedule") {
  CHECK(xi_hat(SymMat(4)) == 1.0);
  Eigen::Vector4d u(1, 1, 1, 1);
  CHECK(xi_hat(SymMat::symmetrize(u * u.transpose())) == doctest::Approx(1.0));  // 2·coh = 1
  CHECK(xi_hat(SymMat::unit(4, 0, 0)) == 1.0);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(16);
  CHECK(xi_hat(SymMat::symmetrize(v * v.transpose())) == doctest::Approx(0.5));

  const LambdaRule rule{2.0, 3.0};
  CHECK(lambda_schedule(rule, 10, 1000, 0.5) == doctest::Approx(2.0 / 0.5 * std::sqrt(3.0 * 10 * std::log(10.0) / 1000)));
  CHECK(lambda_schedule(rule, 10, 4000, 0.5) == doctest::Approx(0.5 * lambda_schedule(rule, 10, 1000, 0.5)));
  CHECK_THROWS(lambda_schedule(rule, 10, 0, 0.5));
  CHECK_THROWS(lambda_schedule(rule, 10, 10, 0.0));
}

TEST_CASE("auto gamma") {
  CHECK(auto_gamma(std::nullopt) == 1.0);
  GammaRange g;
  g.gamma_min = 0.04;
  g.gamma_max = 0.25;
  g.feasible = true;
  CHECK(auto_gamma(g) == doctest::Approx(0.1));
  g.feasible = false;
  CHECK(auto_gamma(g) == 1.0);
  g = GammaRange{0.0, 0.25, true};
  CHECK(auto_gamma(g) == 1.0);
  g = GammaRange{0.1, std::numeric_limits<double>::infinity(), true};
  CHECK(auto_gamma(g) == 1.0);
}

TEST_CASE("geometry report with a rank-zero low-rank part") {
  SymMat s(4);
  s.set(0, 1, 0.8);
  DiagnoseOptions opt;
  opt.lambda_n = 0.1;
  const GeometryReport rep = geometry_report(s, SymMat(4), opt);
  REQUIRE(rep.gamma_range);
  CHECK(rep.gamma_range->gamma_min == 0.0);
  CHECK(rep.gamma_range->feasible);
  CHECK(rep.json["t"]["rank"] == 0);
  CHECK(rep.json["t"]["xi_upper"] == 0.0);
  CHECK(rep.json["gap"]["sigma_vacuous"] == true);
  CHECK(rep.json["omega"]["mu"]["exact"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("population limit recovers the support") {
  ExperimentConfig c = benign_config();
  c.population = true;
  c.lambda_rule.c2_scale = 0.05;
  c.solver.max_iterations = 100000;
  const SingleRun r = run_single(c, 1000000, 3);
  CHECK(r.converged);
  CHECK(r.metrics.support_recall == 1.0);
  CHECK(r.metrics.support_precision == 1.0);
  CHECK(r.metrics.rank_match);
}

TEST_CASE("population path error decreases to zero") {
  const GroundTruth t = generate_truth(benign_config(), 37);
  const SymMat phi_star = expected_second_moment(SymMat(t.s_star + t.l_star));
  std::vector<double> lambdas;
  for (double lam = 0.1; lam > 1e-4; lam *= 0.5) lambdas.push_back(lam);
  SolverConfig cfg;
  cfg.max_iterations = 200000;
  const auto path = solve_path(phi_star, lambdas, 0.5, cfg);
  double last = 1e300;
  for (const SolverResult& r : path) {
    REQUIRE(r.converged);
    const double err = gamma_norm(r.estimate.s() - t.s_star, r.estimate.l() - t.l_star, 0.5);
    CHECK(err <= last + 1e-6);
    last = err;
  }
  CHECK(last < 0.01);
}

TEST_CASE("lambda above the zero threshold gives the empty model") {
  ExperimentConfig c = small_config();
  c.lambda_rule.c2_scale = 1000.0;
  c.gamma = 1.0;
  const SingleRun r = run_single(c, 500, 1);
  CHECK(r.converged);
  CHECK(r.metrics.rank_est == 0);
  CHECK(r.metrics.support_recall == 0.0);
  CHECK(r.metrics.support_precision == 1.0);
}

TEST_CASE("run_single is deterministic") {
  const ExperimentConfig c = small_config();
  const SingleRun a = run_single(c, 500, 2);
  const SingleRun b = run_single(c, 500, 2);
  CHECK(a.diagnostics.dump() == b.diagnostics.dump());
  CHECK(a.lambda_n == lambda_schedule(c.lambda_rule, c.d, 500, a.diagnostics["xi_hat"].get<double>()));
}

TEST_CASE("a fixed truth seed shares the instance across seeds") {
  ExperimentConfig c = benign_config();
  c.seeds = {1, 2};
  c.n_grid = {2000};
  const SweepTable t = consistency_sweep(c);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].diagnostics["truth"]["seed"] == 37);
  CHECK(t.rows[1].diagnostics["truth"]["seed"] == 37);
  CHECK(t.rows[0].diagnostics["truth"]["edges"] == t.rows[1].diagnostics["truth"]["edges"]);
  CHECK(t.rows[0].metrics.gamma_norm_error != t.rows[1].metrics.gamma_norm_error);
}

TEST_CASE("run_single with automatic gamma") {
  ExperimentConfig c = small_config();
  c.gamma.reset();
  const SingleRun r = run_single(c, 500, 1);
  CHECK(r.gamma > 0);
  CHECK(r.diagnostics["geometry"].contains("stability"));
  CHECK(r.diagnostics["gamma_source"].get<std::string>().rfind("auto", 0) == 0);
}

TEST_CASE("consistency sweep table") {
  ExperimentConfig c = small_config();
  c.seeds = {2, 1, 2};
  c.n_grid = {5000, 500};
  const SweepTable t = consistency_sweep(c);
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0].n == 500);
  CHECK(t.rows[0].seed == 1);
  CHECK(t.rows[3].n == 5000);
  CHECK(t.rows[3].seed == 2);
  REQUIRE(t.aggregates.size() == 2);
  REQUIRE(t.slope);
  CHECK(t.rows_csv().rfind("n,seed,lambda,gamma,precision,recall,sign_ok,rank_true,rank_est,gnorm_err,kkt_ok\n", 0) ==
        0);
  CHECK(t.rows_csv() == consistency_sweep(c).rows_csv());

  c.n_grid = {800};
  const SweepTable single = consistency_sweep(c);
  CHECK(single.aggregates.size() == 1);
  CHECK_FALSE(single.slope);
}

TEST_CASE("concentration experiment") {
  const ConcentrationTable one = concentration_experiment(SymMat(4), {100, 400}, 1, 5);
  CHECK(one.csv().rfind("n,value\n", 0) == 0);
  REQUIRE(one.rows.size() == 2);
  CHECK(one.rows[0].values.size() == 1);
  CHECK(one.rows[0].median == one.rows[0].values[0]);

  // Θ = 0: Φ* has ½ on the diagonal and ¼ off it
  SymMat phi_star = SymMat::constant(4, 0.25);
  for (Index i = 0; i < 4; ++i) phi_star.set(i, i, 0.5);
  CHECK(max_abs(SymMat(expected_second_moment(SymMat(4)) - phi_star)) < 1e-15);

  const ConcentrationTable many = concentration_experiment(SymMat(4), {100, 1000}, 20, 5);
  CHECK(many.csv().rfind("n,trials,median,p90\n", 0) == 0);
  for (const auto& row : many.rows) {
    CHECK(row.values.size() == 20);
    CHECK(row.p90 >= row.median);
  }
  REQUIRE(many.slope);
  CHECK(*many.slope < 0);
  CHECK(many.csv() == concentration_experiment(SymMat(4), {100, 1000}, 20, 5).csv());
  CHECK_THROWS(concentration_experiment(SymMat(4), {100}, 0, 1));
}

TEST_CASE("statistics helpers") {
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.9) == doctest::Approx(4.6));
  CHECK(quantile({1, 2, 3, 4, 5}, 0.0) == 1);
  CHECK(quantile({1, 2, 3, 4, 5}, 1.0) == 5);
  CHECK(quantile({7}, 0.9) == 7);
  CHECK(loglog_slope({1, 10, 100}, {1, 0.1, 0.01}) == doctest::Approx(-1.0));
  CHECK(loglog_slope({100, 1000, 10000}, {0.3, 0.3 / std::sqrt(10.0), 0.03}) == doctest::Approx(-0.5));
}
