#include "slr/maxent.hpp"

#include "slr/detail/prox_gradient.hpp"
#include "slr/geometry.hpp"
#include "slr/ising.hpp"

#include <cmath>
#include <stdexcept>

namespace slr {

DiscreteDistribution::DiscreteDistribution(int dim, std::vector<double> probabilities)
    : dim_(dim), p_(std::move(probabilities)) {
  check_enumerable(dim);
  if (p_.size() != state_count(dim)) throw std::invalid_argument("DiscreteDistribution: expected 2^d entries");
  double total = 0.0;
  for (double v : p_) {
    if (v < 0.0) throw std::invalid_argument("DiscreteDistribution: negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("DiscreteDistribution: probabilities do not sum to 1");
}

DiscreteDistribution primal_from_dual(const SymMat& theta) {
  return {static_cast<int>(theta.dim()), state_probabilities(theta)};
}

double entropy(const DiscreteDistribution& p) {
  double h = 0.0;
  for (double v : p.probabilities())
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

SymMat expected_moments(const DiscreteDistribution& p) {
  return weighted_second_moment<double>(p.probabilities(), p.dim());
}

ConstraintResiduals constraint_residuals(const DiscreteDistribution& p, const SymMat& phi_n, double c, double lambda) {
  if (phi_n.dim() != p.dim()) throw std::invalid_argument("constraint_residuals: dimension mismatch");
  const SymMat diff = expected_moments(p) - phi_n;
  ConstraintResiduals r;
  r.inf_violation = std::max(0.0, max_abs(diff) - c);
  r.spec_violation = std::max(0.0, spectral_norm(diff) - lambda);
  r.one_sided_violation = std::max(0.0, max_eigenvalue(SymMat(-diff)) - lambda);
  return r;
}

TwoSidedDualSolution::TwoSidedDualSolution(SymMat s, SymMat l1, SymMat l2)
    : s_(std::move(s)), l1_(std::move(l1)), l2_(std::move(l2)) {
  s_.check_same_dim(l1_);
  s_.check_same_dim(l2_);
  for (const SymMat* l : {&l1_, &l2_}) {
    const auto ev = eigenvalues(*l);
    if (ev(0) < -1e-9 * (1.0 + std::max(0.0, ev(ev.size() - 1)))) {
      throw std::invalid_argument("TwoSidedDualSolution: L1 and L2 must be positive semidefinite");
    }
  }
}

double dual_objective(const TwoSidedDualSolution& dual, const SymMat& phi_n, double c, double lambda) {
  dual.s().check_same_dim(phi_n);
  return -neg_log_likelihood(dual.theta(), phi_n) - c * l1_norm(dual.s()) -
         lambda * (trace(dual.l1()) + trace(dual.l2()));
}

namespace {

struct PsdBlockKkt {
  double residual;
  double slack;
};

// Optimality of L ⪰ 0 for  min −⟨L, w⟩ + λ tr L:  P_T(w) = λ UUᵀ and
// λ_max(P_{T⊥}(w)) ≤ λ.
PsdBlockKkt psd_block_kkt(const SymMat& l, const SymMat& w, double lambda, double rank_rel) {
  const LowRankBasis basis = lowrank_tangent(l, rank_rel);
  PsdBlockKkt out{0.0, 0.0};
  if (basis.rank() > 0) {
    out.residual = spectral_norm(project_t(basis, w) - lambda * SymMat::symmetrize(basis.projector()));
  }
  out.slack = lambda - max_eigenvalue(project_t_perp(basis, w));
  return out;
}

}  // namespace

DualKkt dual_kkt(const TwoSidedDualSolution& dual, const SymMat& phi_n, double c, double lambda,
                 const KktTolerances& tol) {
  const SymMat d = phi_n - expected_second_moment(dual.theta());  // −∇ℓ
  DualKkt k;
  const double scale = max_abs(dual.s());
  const SupportSet omega = sparse_tangent(dual.s(), scale > 0 ? tol.support_rel * scale : 0.0);
  double off = 0.0;
  for (Index j = 0; j < d.dim(); ++j) {
    for (Index i = 0; i < d.dim(); ++i) {
      if (omega.contains(i, j)) {
        const double sgn = dual.s()(i, j) > 0 ? 1.0 : -1.0;
        k.s_residual = std::max(k.s_residual, std::abs(d(i, j) - c * sgn));
      } else {
        off = std::max(off, std::abs(d(i, j)));
      }
    }
  }
  k.s_slack = c - off;
  const auto b1 = psd_block_kkt(dual.l1(), d, lambda, tol.rank_rel);
  const auto b2 = psd_block_kkt(dual.l2(), SymMat(-d), lambda, tol.rank_rel);
  k.l1_residual = b1.residual;
  k.l1_slack = b1.slack;
  k.l2_residual = b2.residual;
  k.l2_slack = b2.slack;
  return k;
}

namespace {

std::vector<detail::Block> dual_blocks(double c, double lambda, bool two_sided) {
  detail::Block sparse;
  sparse.sign = 1.0;
  sparse.prox = [=](const SymMat& m, double step) { return prox_l1(m, step * c); };
  sparse.penalty = [=](const SymMat& s) { return c * l1_norm(s); };
  sparse.residual_norm = [=](const SymMat& r) { return max_abs(r) * lambda / c; };

  detail::Block up;
  up.sign = 1.0;
  up.prox = [=](const SymMat& m, double step) { return prox_psd_trace(m, step * lambda); };
  up.penalty = [=](const SymMat& l) { return lambda * trace(l); };
  up.residual_norm = [](const SymMat& r) { return spectral_norm(r); };

  std::vector<detail::Block> blocks{sparse, up};
  if (two_sided) {
    detail::Block down = up;
    down.sign = -1.0;
    blocks.push_back(down);
  }
  return blocks;
}

TwoSidedDualResult solve_dual(const SymMat& phi_n, double c, double lambda, const SolverConfig& config,
                              bool two_sided) {
  if (!(c > 0) || !(lambda > 0)) throw std::invalid_argument("solve_dual: c and lambda must be > 0");
  const Index d = phi_n.dim();
  std::vector<SymMat> x0(two_sided ? 3 : 2, SymMat(d));
  auto outcome = detail::prox_gradient(phi_n, dual_blocks(c, lambda, two_sided), std::move(x0), config);
  SymMat l2 = two_sided ? std::move(outcome.x[2]) : SymMat(d);
  TwoSidedDualSolution sol(std::move(outcome.x[0]), std::move(outcome.x[1]), std::move(l2));
  DualKkt kkt = dual_kkt(sol, phi_n, c, lambda);
  const double g = -outcome.objective;
  return {std::move(sol), g, outcome.iterations, outcome.converged, kkt};
}

}  // namespace

TwoSidedDualResult solve_two_sided_dual(const SymMat& phi_n, double c, double lambda, const SolverConfig& config) {
  return solve_dual(phi_n, c, lambda, config, true);
}

TwoSidedDualResult solve_one_sided_dual(const SymMat& phi_n, double c, double lambda, const SolverConfig& config) {
  return solve_dual(phi_n, c, lambda, config, false);
}

DualityReport duality_report(const TwoSidedDualSolution& dual, const SymMat& phi_n, double c, double lambda,
                             bool one_sided) {
  dual.s().check_same_dim(phi_n);
  const SymMat theta = dual.theta();
  const DiscreteDistribution p = primal_from_dual(theta);
  const SymMat e = expected_moments(p);
  const SymMat d = phi_n - e;

  DualityReport rep;
  rep.one_sided = one_sided;
  rep.entropy = entropy(p);
  rep.dual_objective = dual_objective(dual, phi_n, c, lambda);
  rep.gap = std::abs(rep.entropy + rep.dual_objective);
  rep.lagrangian_correction =
      inner(theta, d) - c * l1_norm(dual.s()) - lambda * (trace(dual.l1()) + trace(dual.l2()));
  rep.residuals = constraint_residuals(p, phi_n, c, lambda);

  for (Index j = 0; j < d.dim(); ++j) {
    for (Index i = 0; i < d.dim(); ++i) {
      const double s = dual.s()(i, j);
      if (s == 0.0) continue;
      const double sgn = s > 0 ? 1.0 : -1.0;
      rep.slackness_s = std::max(rep.slackness_s, std::abs(s) * std::abs(c - sgn * d(i, j)));
    }
  }
  const SymMat id = SymMat::identity(d.dim());
  rep.slackness_l1 = inner(dual.l1(), lambda * id - d);
  rep.slackness_l2 = inner(dual.l2(), lambda * id + d);
  return rep;
}

}  // namespace slr
