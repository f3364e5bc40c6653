#include "slr/solver.hpp"

#include "slr/detail/prox_gradient.hpp"
#include "slr/geometry.hpp"
#include "slr/ising.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slr {

SparseLowRankPair::SparseLowRankPair(SymMat s, SymMat l) : s_(std::move(s)), l_(std::move(l)) {
  s_.check_same_dim(l_);
  const auto ev = eigenvalues(l_);
  const double top = std::max(0.0, ev(ev.size() - 1));
  if (ev(0) < -1e-9 * (1.0 + top)) {
    throw std::invalid_argument("SparseLowRankPair: L is not positive semidefinite (min eigenvalue " +
                                std::to_string(ev(0)) + ")");
  }
}

void SolverConfig::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  if (!(rel_objective_tol > 0)) throw std::invalid_argument("SolverConfig: rel_objective_tol must be > 0");
  if (!(kkt_tol > 0)) throw std::invalid_argument("SolverConfig: kkt_tol must be > 0");
  if (!(initial_step > 0)) throw std::invalid_argument("SolverConfig: initial_step must be > 0");
  if (!(backtracking_factor > 0 && backtracking_factor < 1)) {
    throw std::invalid_argument("SolverConfig: backtracking_factor must be in (0, 1)");
  }
}

SymMat prox_l1(const SymMat& m, double t, bool penalize_diagonal) {
  if (t < 0) throw std::invalid_argument("prox_l1: negative threshold");
  SymMat out(m.dim());
  for (Index j = 0; j < m.dim(); ++j) {
    for (Index i = j; i < m.dim(); ++i) {
      const double v = m(i, j);
      if (i == j && !penalize_diagonal) {
        out.set(i, j, v);
        continue;
      }
      const double a = std::abs(v) - t;
      out.set(i, j, a > 0 ? std::copysign(a, v) : 0.0);
    }
  }
  return out;
}

SymMat prox_psd_trace(const SymMat& m, double t) {
  if (t < 0) throw std::invalid_argument("prox_psd_trace: negative threshold");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix());
  const Eigen::VectorXd shrunk = (es.eigenvalues().array() - t).max(0.0).matrix();
  if ((shrunk.array() == 0.0).all()) return SymMat(m.dim());
  const Eigen::MatrixXd& q = es.eigenvectors();
  return SymMat::symmetrize(q * shrunk.asDiagonal() * q.transpose());
}

namespace {

double l1_penalty(const SymMat& s, bool penalize_diagonal) {
  double v = l1_norm(s);
  if (!penalize_diagonal) v -= s.matrix().diagonal().cwiseAbs().sum();
  return v;
}

}  // namespace

double objective(const SparseLowRankPair& pair, double lambda_n, double gamma, const SymMat& phi_n,
                 bool penalize_diagonal) {
  pair.s().check_same_dim(phi_n);
  return neg_log_likelihood(pair.theta(), phi_n) +
         lambda_n * (gamma * l1_penalty(pair.s(), penalize_diagonal) + trace(pair.l()));
}

namespace detail {

namespace {

SymMat combine(const std::vector<Block>& blocks, const std::vector<SymMat>& x) {
  SymMat theta(x.front().dim());
  for (std::size_t k = 0; k < blocks.size(); ++k) theta += blocks[k].sign * x[k];
  return theta;
}

double penalties(const std::vector<Block>& blocks, const std::vector<SymMat>& x) {
  double v = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) v += blocks[k].penalty(x[k]);
  return v;
}

// Natural residual max_k ‖X_k − prox_k(X_k − sign_k G, 1)‖.
double natural_residual(const std::vector<Block>& blocks, const std::vector<SymMat>& x, const SymMat& grad) {
  double r = 0.0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const SymMat moved = blocks[k].prox(x[k] - blocks[k].sign * grad, 1.0);
    r = std::max(r, blocks[k].residual_norm(x[k] - moved));
  }
  return r;
}

}  // namespace

ProxGradientOutcome prox_gradient(const SymMat& phi_n, const std::vector<Block>& blocks, std::vector<SymMat> x0,
                                  const SolverConfig& config) {
  config.validate();
  check_enumerable(phi_n.dim());
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  std::vector<SymMat> x = std::move(x0);
  auto fx_eval = evaluate_likelihood(combine(blocks, x), phi_n);
  double fx = fx_eval.value + penalties(blocks, x);

  ProxGradientOutcome out;
  if (natural_residual(blocks, x, fx_eval.gradient) <= config.kkt_tol) {
    out.x = std::move(x);
    out.objective = fx;
    out.converged = true;
    return out;
  }

  std::vector<SymMat> y = x;
  auto fy_eval = fx_eval;
  double momentum = 1.0;
  bool at_x = true;
  double step = config.initial_step;
  int it = 0;
  bool converged = false;

  while (it < config.max_iterations) {
    ++it;
    std::vector<SymMat> z(blocks.size(), SymMat(phi_n.dim()));
    LikelihoodEvaluation<double> fz_eval{0.0, SymMat(phi_n.dim()), SymMat(phi_n.dim())};
    for (;;) {
      double linear = 0.0;
      double quad = 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const double sk = blocks[k].sign;
        z[k] = blocks[k].prox(y[k] - (step * sk) * fy_eval.gradient, step);
        const SymMat diff = z[k] - y[k];
        linear += sk * inner(fy_eval.gradient, diff);
        quad += inner(diff, diff);
      }
      fz_eval = evaluate_likelihood(combine(blocks, z), phi_n);
      const double bound = fy_eval.value + linear + quad / (2.0 * step);
      if (fz_eval.value <= bound + 10.0 * kEps * (1.0 + std::abs(fy_eval.value))) break;
      step *= config.backtracking_factor;
      if (step < 1e-30) throw std::runtime_error("prox_gradient: step size underflow");
    }
    const double fz = fz_eval.value + penalties(blocks, z);

    if (fz > fx) {
      if (config.acceleration && !at_x) {
        // Restart: drop the momentum and take a plain step from x next time.
        y = x;
        fy_eval = fx_eval;
        momentum = 1.0;
        at_x = true;
        continue;
      }
      // A plain step cannot increase the objective beyond rounding; stop.
      converged = fz - fx <= config.rel_objective_tol * std::max(1.0, std::abs(fx));
      break;
    }

    const double previous = fx;
    std::vector<SymMat> x_prev = std::move(x);
    x = std::move(z);
    fx = fz;
    fx_eval = std::move(fz_eval);

    if (natural_residual(blocks, x, fx_eval.gradient) <= config.kkt_tol ||
        std::abs(previous - fx) <= config.rel_objective_tol * std::max(1.0, std::abs(fx))) {
      converged = true;
      break;
    }

    if (config.acceleration) {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const double beta = (momentum - 1.0) / next;
      momentum = next;
      if (beta > 0.0) {
        for (std::size_t k = 0; k < blocks.size(); ++k) y[k] = x[k] + beta * (x[k] - x_prev[k]);
        fy_eval = evaluate_likelihood(combine(blocks, y), phi_n);
        at_x = false;
        continue;
      }
    }
    y = x;
    fy_eval = fx_eval;
    at_x = true;
  }

  out.x = std::move(x);
  out.objective = fx;
  out.iterations = it;
  out.converged = converged;
  return out;
}

}  // namespace detail

namespace {

std::vector<detail::Block> slr_blocks(double lambda_n, double gamma, bool penalize_diagonal) {
  detail::Block sparse;
  sparse.sign = 1.0;
  sparse.prox = [=](const SymMat& m, double step) { return prox_l1(m, step * lambda_n * gamma, penalize_diagonal); };
  sparse.penalty = [=](const SymMat& s) { return lambda_n * gamma * l1_penalty(s, penalize_diagonal); };
  sparse.residual_norm = [=](const SymMat& r) { return max_abs(r) / gamma; };

  detail::Block lowrank;
  lowrank.sign = 1.0;
  lowrank.prox = [=](const SymMat& m, double step) { return prox_psd_trace(m, step * lambda_n); };
  lowrank.penalty = [=](const SymMat& l) { return lambda_n * trace(l); };
  lowrank.residual_norm = [](const SymMat& r) { return spectral_norm(r); };
  return {sparse, lowrank};
}

}  // namespace

SolverResult solve_slr(const SymMat& phi_n, double lambda_n, double gamma, const SolverConfig& config,
                       const std::optional<SparseLowRankPair>& warm_start) {
  if (!(lambda_n > 0)) throw std::invalid_argument("solve_slr: lambda_n must be > 0");
  if (!(gamma > 0)) throw std::invalid_argument("solve_slr: gamma must be > 0");
  config.validate();
  std::vector<SymMat> x0{SymMat(phi_n.dim()), SymMat(phi_n.dim())};
  if (warm_start) {
    warm_start->s().check_same_dim(phi_n);
    x0 = {warm_start->s(), warm_start->l()};
  }
  auto outcome = detail::prox_gradient(phi_n, slr_blocks(lambda_n, gamma, config.penalize_diagonal),
                                       std::move(x0), config);
  SparseLowRankPair estimate(std::move(outcome.x[0]), std::move(outcome.x[1]));
  KktReport kkt = verify_kkt(estimate, lambda_n, gamma, phi_n, {}, config.penalize_diagonal);
  return {std::move(estimate), outcome.objective, outcome.iterations, outcome.converged, kkt};
}

KktReport verify_kkt(const SparseLowRankPair& pair, double lambda_n, double gamma, const SymMat& phi_n,
                     const KktTolerances& tol, bool penalize_diagonal) {
  pair.s().check_same_dim(phi_n);
  const Index d = phi_n.dim();
  const SymMat grad = nll_gradient(pair.theta(), phi_n);
  const double lg = lambda_n * gamma;
  KktReport rep;

  const double s_scale = max_abs(pair.s());
  const SupportSet omega = sparse_tangent(pair.s(), s_scale > 0 ? tol.support_rel * s_scale : 0.0);
  double perp_max = 0.0;
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      const double g = grad(i, j);
      if (i == j && !penalize_diagonal) {
        rep.omega_residual = std::max(rep.omega_residual, std::abs(g));
      } else if (omega.contains(i, j)) {
        const double sgn = pair.s()(i, j) > 0 ? 1.0 : -1.0;
        rep.omega_residual = std::max(rep.omega_residual, std::abs(-g - lg * sgn));
      } else {
        perp_max = std::max(perp_max, std::abs(g));
      }
    }
  }
  rep.support_size = omega.size();
  rep.omega_perp_slack = lg - perp_max;

  const LowRankBasis basis = lowrank_tangent(pair.l(), tol.rank_rel);
  rep.rank = static_cast<int>(basis.rank());
  const SymMat neg_grad = -grad;
  if (basis.rank() > 0) {
    const SymMat pu = SymMat::symmetrize(basis.u() * basis.u().transpose());
    rep.t_residual = spectral_norm(project_t(basis, neg_grad) - lambda_n * pu);
  }
  const SymMat perp = project_t_perp(basis, neg_grad);
  rep.t_perp_slack = lambda_n - spectral_norm(perp);
  rep.t_perp_slack_psd = lambda_n - max_eigenvalue(perp);

  const bool residuals_ok = rep.omega_residual <= tol.residual && rep.t_residual <= tol.residual;
  rep.strictly_dual_feasible = residuals_ok && rep.omega_perp_slack > 0 && rep.t_perp_slack > 0;
  rep.optimal = residuals_ok && rep.omega_perp_slack >= -tol.residual && rep.t_perp_slack_psd >= -tol.residual;
  return rep;
}

std::vector<SolverResult> solve_path(const SymMat& phi_n, const std::vector<double>& lambdas, double gamma,
                                     const SolverConfig& config) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0)) throw std::invalid_argument("solve_path: lambdas must be positive");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1])) {
      throw std::invalid_argument("solve_path: lambdas must be strictly descending");
    }
  }
  std::vector<SolverResult> path;
  path.reserve(lambdas.size());
  for (double lambda : lambdas) {
    std::optional<SparseLowRankPair> warm;
    if (!path.empty()) warm = path.back().estimate;
    path.push_back(solve_slr(phi_n, lambda, gamma, config, warm));
  }
  return path;
}

ZeroSolutionThreshold zero_solution_threshold(const SymMat& phi_n) {
  const SymMat grad0 = nll_gradient(SymMat(phi_n.dim()), phi_n);
  return {max_abs(grad0), max_eigenvalue(SymMat(-grad0))};
}

}  // namespace slr
