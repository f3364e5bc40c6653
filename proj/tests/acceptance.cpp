// Acceptance suite: one PASS/FAIL line per criterion, with wall time
// against the runtime budget. Exit status is non-zero if any criterion fails.

#include "slr/experiments.hpp"
#include "slr/geometry.hpp"
#include "slr/io.hpp"
#include "slr/ising.hpp"
#include "slr/latent_cg.hpp"
#include "slr/maxent.hpp"
#include "slr/sampler.hpp"
#include "slr/solver.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#ifndef SLR_SOURCE_DIR
#define SLR_SOURCE_DIR "."
#endif

using namespace slr;

namespace {

// Collects failed sub-checks; the first few are reported.
class Checker {
 public:
  void require(bool ok, const std::string& what) {
    ++count_;
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }
  bool ok() const { return failures_.empty(); }
  std::string summary() const {
    std::ostringstream os;
    if (ok()) {
      os << count_ << " checks";
    } else {
      os << failures_.size() << "/" << count_ << " checks failed:";
      for (std::size_t k = 0; k < failures_.size() && k < 3; ++k) os << " [" << failures_[k] << "]";
    }
    if (!notes_.empty()) os << "; " << notes_;
    return os.str();
  }

 private:
  int count_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- 1, 2

void gradient_oracle(Checker& c) {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SymMat theta = oracle::random_symmetric(4, rng);
    const SymMat phi = expected_second_moment(oracle::random_symmetric(4, rng));
    const auto f = [&](const SymMat& t) { return neg_log_likelihood(t, phi); };
    SymMat fd(4);
    for (Index j = 0; j < 4; ++j)
      for (Index i = j; i < 4; ++i) {
        const double dd = oracle::directional(f, theta, SymMat::unit(4, i, j), 1e-5);
        fd.set(i, j, i == j ? dd : dd / 2.0);
      }
    const double err = oracle::rel_err(nll_gradient(theta, phi), fd);
    worst = std::max(worst, err);
    c.require(err <= 1e-6, "instance " + std::to_string(k) + " rel err " + fmt(err));
  }
  c.note("max rel err " + fmt(worst));
}

void hessian_oracle(Checker& c) {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  double min_quad = 1e300;
  for (int k = 0; k < 20; ++k) {
    const SymMat theta = oracle::random_symmetric(4, rng);
    const SymMat phi = expected_second_moment(oracle::random_symmetric(4, rng));
    const SymMat m1 = oracle::random_symmetric(4, rng);
    const SymMat m2 = oracle::random_symmetric(4, rng);
    const double h = 1e-5;
    const SymMat fd = (1.0 / (2 * h)) * (nll_gradient(SymMat(theta + h * m1), phi) -
                                         nll_gradient(SymMat(theta - h * m1), phi));
    const SymMat h1 = hessian_vector_product(theta, m1);
    const double err = oracle::rel_err(h1, fd);
    worst = std::max(worst, err);
    c.require(err <= 1e-5, "instance " + std::to_string(k) + " rel err " + fmt(err));
    const double asym = std::abs(inner(h1, m2) - inner(m1, hessian_vector_product(theta, m2)));
    c.require(asym <= 1e-10, "self-adjointness " + fmt(asym));
    const double quad = inner(h1, m1);
    min_quad = std::min(min_quad, quad);
    c.require(quad >= -1e-10, "<Hm,m> = " + fmt(quad));
  }
  c.note("max rel err " + fmt(worst) + ", min <Hm,m> " + fmt(min_quad));
}

// ---------------------------------------------------------------- 3, 4

void sampler_correctness(Checker& c) {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int d = 1; d <= 5; ++d) {
    const SymMat theta = oracle::random_symmetric(d, rng);
    const auto p = oracle::probabilities(theta);
    for (int s = 0; s < (1 << d); ++s)
      for (int i = 0; i < d; ++i) {
        const double p1 = p[std::size_t(s | (1 << i))];
        const double p0 = p[std::size_t(s & ~(1 << i))];
        worst = std::max(worst, std::abs(gibbs_conditional(theta, unpack(State(s), d), i) - p1 / (p0 + p1)));
      }
  }
  c.require(worst <= 1e-10, "conditional error " + fmt(worst));
  const SymMat theta = oracle::random_symmetric(3, rng);
  GibbsConfig cfg;
  cfg.burn_in = 1000;
  cfg.seed = 17;
  const double tv = empirical_vs_exact_tv(gibbs_sample(theta, 50000, cfg), theta);
  c.require(tv < 0.02, "TV " + fmt(tv));
  c.note("max conditional error " + fmt(worst) + ", TV " + fmt(tv));
}

void marginalization(Checker& c) {
  std::mt19937_64 rng(404);
  const int d = 4, l = 2;
  std::normal_distribution<double> n(0.0, 0.7);
  Eigen::MatrixXd r(l, d);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = n(rng);
  const SymMat lambda = SymMat::identity(l) + 0.3 * oracle::random_psd(l, l, rng);
  const LatentCGModel model(0.5 * oracle::random_symmetric(d, rng), r, lambda);
  BinaryDataset xs(d);
  for (const auto& s : sample_full(model, 100000, 44)) xs.push_back(s.x);
  // Reference interaction built directly from the model blocks.
  const SymMat theta =
      model.s() + SymMat(0.5 * SymMat::symmetrize(r.transpose() * lambda.matrix().inverse() * r));
  const double tv = empirical_vs_exact_tv(xs, theta);
  c.require(tv < 0.03, "TV " + fmt(tv));
  c.note("TV " + fmt(tv));
}

// ---------------------------------------------------------------- 5

void solver_certificate(Checker& c) {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int strict = 0;
  double worst_residual = 0.0;
  for (int k = 0; k < 20; ++k) {
    SymMat s(4);
    s.set(0, 1, u(rng));
    s.set(2, 3, u(rng));
    const SymMat theta = s + SymMat(0.5 * oracle::random_psd(4, 1, rng));
    const SymMat phi = empirical_second_moment(exact_sample(theta, 2000, 1000 + k));
    const std::string tag = "instance " + std::to_string(k);

    const SolverResult r = solve_slr(phi, 0.05, 0.5);
    c.require(r.converged, tag + " not converged");
    const double res = std::max(r.kkt.omega_residual, r.kkt.t_residual);
    worst_residual = std::max(worst_residual, res);
    c.require(res <= 1e-6, tag + " residual " + fmt(res));
    c.require(r.kkt.omega_perp_slack >= -1e-6 && r.kkt.t_perp_slack_psd >= -1e-6, tag + " infeasible");
    if (r.kkt.strictly_dual_feasible) {
      ++strict;
      c.require(r.kkt.omega_perp_slack > 0 && r.kkt.t_perp_slack_psd > 0, tag + " strict slack not positive");
    }

    // Zero solution exactly when ‖∇ℓ(0)‖∞ ≤ λγ and λ_max(−∇ℓ(0)) ≤ λ.
    const SymMat g0 = nll_gradient(SymMat(4), phi);
    const auto th = zero_solution_threshold(phi);
    c.require(th.lambda_gamma == max_abs(g0) && th.lambda == max_eigenvalue(SymMat(-g0)), tag + " threshold");
    const double lam = std::max(th.lambda, 1e-3) * 1.01;
    const SolverResult above = solve_slr(phi, lam, th.lambda_gamma * 1.01 / lam);
    c.require(above.iterations == 0 && max_abs(above.estimate.s()) == 0.0 && max_abs(above.estimate.l()) == 0.0,
              tag + " not zero above threshold");
    const SolverResult below = solve_slr(phi, lam, th.lambda_gamma * 0.99 / lam);
    c.require(max_abs(below.estimate.s()) > 0.0, tag + " zero below the entrywise threshold");
    if (th.lambda > 1e-3) {
      const SolverResult below_l = solve_slr(phi, th.lambda * 0.99, 1e6);
      c.require(max_abs(below_l.estimate.l()) > 0.0, tag + " zero below the spectral threshold");
    }
  }
  c.note("max residual " + fmt(worst_residual) + ", strictly feasible " + std::to_string(strict) + "/20");
}

// ---------------------------------------------------------------- 6

SymMat uniform_moments(Index d) {
  SymMat m = SymMat::constant(d, 0.25);
  for (Index i = 0; i < d; ++i) m.set(i, i, 0.5);
  return m;
}

void duality(Checker& c) {
  SolverConfig precise;
  precise.max_iterations = 200000;
  {
    const SymMat phi = uniform_moments(3);
    const auto r = solve_two_sided_dual(phi, 0.1, 0.1, precise);
    const DualityReport rep = duality_report(r.solution, phi, 0.1, 0.1);
    c.require(r.converged && rep.gap <= 1e-6, "uniform gap " + fmt(rep.gap));
  }
  double worst_gap = 0.0, worst_slack = 0.0, worst_obj = 0.0;
  for (std::uint64_t seed = 600; seed < 610; ++seed) {
    // Moments from a model with a pronounced positive rank-one part; the
    // tolerances are tight enough that both constraints bind.
    std::mt19937_64 rng(seed);
    SymMat theta = oracle::random_symmetric(3, rng, 0.3);
    theta += oracle::random_psd(3, 1, rng, 0.9);
    const SymMat phi = empirical_second_moment<double>(exact_sample(theta, 400, seed));
    const SymMat diff = phi - uniform_moments(3);
    const double cc = 0.8 * max_abs(diff);
    const double lam = 0.4 * max_eigenvalue(diff);
    const std::string tag = "seed " + std::to_string(seed);

    const auto r = solve_two_sided_dual(phi, cc, lam, precise);
    const DualityReport rep = duality_report(r.solution, phi, cc, lam);
    const double slack = std::max({std::abs(rep.slackness_s), std::abs(rep.slackness_l1), std::abs(rep.slackness_l2)});
    worst_gap = std::max(worst_gap, rep.gap);
    worst_slack = std::max(worst_slack, slack);
    c.require(r.converged, tag + " two-sided not converged");
    c.require(rep.gap <= 1e-6, tag + " gap " + fmt(rep.gap));
    c.require(slack <= 1e-5, tag + " slackness " + fmt(slack));

    // One-sided dual against the estimator at (λₙ, γ) = (λ, c/λ).
    const auto one = solve_one_sided_dual(phi, cc, lam, precise);
    const SolverResult fit = solve_slr(phi, lam, cc / lam, precise);
    const double diff_obj = std::abs(fit.objective + one.dual_objective);
    worst_obj = std::max(worst_obj, diff_obj);
    c.require(one.converged && fit.converged, tag + " one-sided not converged");
    c.require(diff_obj <= 1e-6, tag + " objective mismatch " + fmt(diff_obj));
    // Both solves share the proximal engine; the primal entropy is an
    // independent witness.
    const DualityReport one_rep = duality_report(one.solution, phi, cc, lam, true);
    c.require(one_rep.gap <= 1e-6, tag + " one-sided gap " + fmt(one_rep.gap));
    c.require(one_rep.residuals.one_sided_violation <= 1e-5, tag + " one-sided primal infeasible");
  }
  c.note("max gap " + fmt(worst_gap) + ", max slackness " + fmt(worst_slack) + ", max one-sided mismatch " +
         fmt(worst_obj));
}

// ---------------------------------------------------------------- 7

LowRankBasis unit_basis(const Eigen::VectorXd& v) { return LowRankBasis(Eigen::MatrixXd(v.normalized())); }

void geometry(Checker& c) {
  std::mt19937_64 rng(707);
  std::bernoulli_distribution coin(0.4);
  double worst_alg = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Index d = 5;
    const LowRankBasis b = lowrank_tangent(oracle::random_psd(d, 1 + t % 3, rng), 1e-9);
    SupportSet omega(d);
    for (Index j = 0; j < d; ++j)
      for (Index i = j; i < d; ++i)
        if (coin(rng)) omega.insert(i, j);
    const SymMat n = oracle::random_symmetric(d, rng);
    const SymMat m = oracle::random_symmetric(d, rng);
    const SymMat pt = project_t(b, n);
    const SymMat po = project_omega(omega, n);
    worst_alg = std::max({worst_alg, max_abs(SymMat(project_t(b, pt) - pt)),
                          std::abs(inner(pt, m) - inner(n, project_t(b, m))),
                          std::abs(inner(project_t_perp(b, n), m) - inner(n, project_t_perp(b, m))),
                          max_abs(SymMat(project_omega(omega, po) - po)),
                          std::abs(inner(po, m) - inner(n, project_omega(omega, m)))});
  }
  c.require(worst_alg <= 1e-12, "projector algebra " + fmt(worst_alg));

  for (int t = 0; t < 200; ++t) {
    const Index d = 2 + t % 6;
    const LowRankBasis b = lowrank_tangent(oracle::random_psd(d, 1 + t % d, rng), 1e-9);
    const SymMat n = oracle::random_symmetric(d, rng);
    const double nn = spectral_norm(n);
    c.require(spectral_norm(project_t(b, n)) <= 2 * nn + 1e-10, "P_T bound");
    c.require(spectral_norm(project_t_perp(b, n)) <= nn + 1e-10, "P_T_perp bound");
    const double coh = coherence(b);
    c.require(coh >= std::sqrt(double(b.rank()) / double(d)) - 1e-10 && coh <= 1 + 1e-10, "coherence bracket");
  }

  std::normal_distribution<double> g(0.0, 1.0);
  int twist_checked = 0;
  double twist_margin = 1e300;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd u(5), w(5);
    for (Index i = 0; i < 5; ++i) u(i) = g(rng), w(i) = g(rng);
    const LowRankBasis b1 = unit_basis(u);
    const LowRankBasis b2 = unit_basis(u + 0.1 * w);
    const double rho = twisting(b2, b1, 16, t);
    if (rho >= 1.0) continue;
    ++twist_checked;
    const double lhs = xi_t(b2, 16, t).lower;
    const double rhs = twisted_xi_bound(xi_t(b1, 16, t).upper, rho);
    twist_margin = std::min(twist_margin, rhs - lhs);
    c.require(lhs <= rhs + 1e-10, "twisted xi trial " + std::to_string(t));
  }
  c.require(twist_checked == 100, "twisted xi applicable in " + std::to_string(twist_checked) + "/100");

  int pert_checked = 0;
  for (int t = 0; t < 100; ++t) {
    // Rank-one L and a rank-one L + Δ nearby, with ‖Δ‖ well inside σ/8.
    Eigen::VectorXd u(4), w(4);
    for (Index i = 0; i < 4; ++i) u(i) = g(rng), w(i) = g(rng);
    u.normalize();
    const double sigma = 1.0 + std::abs(g(rng));
    const Eigen::VectorXd u2 = (u + 0.02 * w).normalized();
    const SymMat l = SymMat::symmetrize(sigma * u * u.transpose());
    const SymMat delta = SymMat::symmetrize(sigma * (1 + 0.01 * g(rng)) * u2 * u2.transpose()) - l;
    const PerturbationCheck r = perturbation_bounds_check(l, delta, 1e-9, 16, std::uint64_t(t));
    if (!r.applicable) continue;
    ++pert_checked;
    c.require(r.twist_bound_ok, "twist bound trial " + std::to_string(t));
    c.require(r.normal_bound_ok, "normal bound trial " + std::to_string(t));
  }
  c.require(pert_checked == 100, "perturbation applicable in " + std::to_string(pert_checked) + "/100");
  c.note("projector algebra " + fmt(worst_alg) + ", min twisted-xi margin " + fmt(twist_margin));
}

// ---------------------------------------------------------------- 8

void concentration_law(Checker& c) {
  const ConcentrationTable t = concentration_experiment(SymMat(8), {100, 1000, 10000}, 50, 808);
  const double slope = t.slope.value_or(0.0);
  c.require(t.slope && slope >= -0.6 && slope <= -0.4, "slope " + fmt(slope));
  c.note("slope " + fmt(slope));
}

ExperimentConfig benign_config() {
  const std::string path = std::string(SLR_SOURCE_DIR) + "/tools/configs/benign_sweep.json";
  return experiment_config_from_json(io::Json::parse(io::read_text(path)));
}

void consistency_law(Checker& c) {
  const ExperimentConfig cfg = benign_config();
  c.require(cfg.d == 10 && cfg.l == 1, "benign instance must be d = 10, l = 1");
  c.require(cfg.n_grid.back() <= 100000, "grid exceeds 1e5");
  const SweepTable t = consistency_sweep(cfg);
  const double slope = t.slope.value_or(0.0);
  c.require(t.slope && slope >= -0.65 && slope <= -0.35, "slope " + fmt(slope));
  const double rate = t.aggregates.back().recovery_rate;
  c.require(rate >= 0.9, "recovery rate at the largest n " + fmt(rate));
  std::string rates;
  for (const auto& a : t.aggregates) rates += (rates.empty() ? "" : ",") + fmt(a.recovery_rate);
  c.note("slope " + fmt(slope) + ", recovery by n [" + rates + "]");
}

// ---------------------------------------------------------------- 9

std::string dataset_text(const BinaryDataset& d) { return io::dataset_to_text(d, io::DatasetFormat::Lines); }

void determinism(Checker& c) {
  std::vector<std::pair<std::string, std::function<std::string()>>> pipelines;
  std::mt19937_64 rng(909);
  const SymMat theta = oracle::random_symmetric(5, rng, 0.5);
  pipelines.emplace_back("exact_sample", [=] { return dataset_text(exact_sample(theta, 5000, 1)); });
  pipelines.emplace_back("gibbs_sample", [=] {
    GibbsConfig g;
    g.seed = 2;
    return dataset_text(gibbs_sample(theta, 2000, g));
  });
  pipelines.emplace_back("sample_full", [] {
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(1, 4, 0.4);
    const LatentCGModel m(SymMat(4), r, SymMat::identity(1));
    std::ostringstream os;
    os.precision(17);
    for (const auto& s : sample_full(m, 2000, 3)) os << s.y.transpose() << "\n";
    return os.str();
  });
  ExperimentConfig sweep_cfg;
  sweep_cfg.d = 6;
  sweep_cfg.support_density = 0.3;
  sweep_cfg.n_grid = {500, 5000};
  sweep_cfg.seeds = {1, 2, 3};
  sweep_cfg.gamma = 0.5;
  pipelines.emplace_back("generate_truth", [=] {
    const GroundTruth g = generate_truth(sweep_cfg, 4);
    return io::matrix_to_json(g.s_star).dump() + io::matrix_to_json(g.l_star).dump();
  });
  pipelines.emplace_back("consistency_sweep", [=] {
    const SweepTable t = consistency_sweep(sweep_cfg);
    std::string out = t.rows_csv() + t.aggregates_csv();
    for (const auto& r : t.rows) out += r.diagnostics.dump();
    return out;
  });
  pipelines.emplace_back("consistency_sweep auto gamma", [=] {
    ExperimentConfig a = sweep_cfg;
    a.gamma.reset();
    a.seeds = {5};
    return consistency_sweep(a).rows_csv();
  });
  pipelines.emplace_back("concentration", [] {
    return concentration_experiment(SymMat(5), {100, 1000}, 10, 6).csv();
  });
  pipelines.emplace_back("geometry_report", [] {
    ExperimentConfig g;
    g.d = 5;
    g.support_density = 0.3;
    const GroundTruth truth = generate_truth(g, 7);
    DiagnoseOptions opt;
    opt.seed = 8;
    return geometry_report(truth.s_star, truth.l_star, opt).json.dump();
  });

  for (const auto& [name, run] : pipelines) {
    const std::string a = run();
    const std::string b = run();
    const auto ha = std::hash<std::string>{}(a);
    const auto hb = std::hash<std::string>{}(b);
    c.require(!a.empty() && ha == hb && a == b, name + " differs between runs");
  }
  c.note(std::to_string(pipelines.size()) + " pipelines hashed twice");
}

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<void(Checker&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "gradient oracle", 5, gradient_oracle},
      {2, "Hessian oracle", 10, hessian_oracle},
      {3, "sampler correctness", 60, sampler_correctness},
      {4, "marginalization", 60, marginalization},
      {5, "solver certificate", 300, solver_certificate},
      {6, "duality", 300, duality},
      {7, "geometry inequalities", 120, geometry},
      {8, "scaling laws", 900,
       [](Checker& c) {
         Checker a, b;
         concentration_law(a);
         consistency_law(b);
         c.require(a.ok(), "(a) " + a.summary());
         c.require(b.ok(), "(b) " + b.summary());
         c.note("(a) " + a.summary() + " | (b) " + b.summary());
       }},
      {9, "determinism", 120, determinism},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < cr.budget_seconds, "runtime " + fmt(secs) + " s over budget");
    const bool ok = c.ok();
    if (!ok) ++failed;
    std::printf("%s criterion %d (%s) [%.2f s / %.0f s]: %s\n", ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), secs,
                cr.budget_seconds, c.summary().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
