#pragma once

// Regularized maximum likelihood for sparse + low-rank Ising models:
//
//   minimize  ℓ(S + L) + λ (γ‖S‖₁ + tr L)   subject to  L ⪰ 0,
//
// with ℓ the average negative log-likelihood, solved by proximal gradient
// on the pair (S, L). Both blocks see the same gradient ∇ℓ(S + L).

#include "slr/symmetric_matrix.hpp"

#include <optional>
#include <vector>

namespace slr {

/// (S, L) with L positive semidefinite up to −1e-9·(1 + λ_max(L)).
class SparseLowRankPair {
 public:
  SparseLowRankPair(SymMat s, SymMat l);
  static SparseLowRankPair zero(Index dim) { return {SymMat(dim), SymMat(dim)}; }

  Index dim() const { return s_.dim(); }
  const SymMat& s() const { return s_; }
  const SymMat& l() const { return l_; }
  SymMat theta() const { return s_ + l_; }

 private:
  SymMat s_;
  SymMat l_;
};

struct SolverConfig {
  int max_iterations = 20000;
  double rel_objective_tol = 1e-14;
  double kkt_tol = 1e-9;  // natural prox-gradient residual, measured in the γ-norm
  double initial_step = 1.0;
  double backtracking_factor = 0.5;
  bool acceleration = true;        // momentum, restarted whenever the objective increases
  bool penalize_diagonal = true;   // include S_ii in ‖S‖₁

  void validate() const;
};

struct KktReport {
  double omega_residual = 0.0;    // max_{Ω} |−G_ij − λγ sign(S_ij)|
  double omega_perp_slack = 0.0;  // λγ − ‖P_{Ω⊥} G‖∞
  double t_residual = 0.0;        // ‖P_T(−G) − λ UUᵀ‖
  double t_perp_slack = 0.0;      // λ − ‖P_{T⊥} G‖
  double t_perp_slack_psd = 0.0;  // λ − λ_max(P_{T⊥}(−G)), the one-sided condition under L ⪰ 0
  bool strictly_dual_feasible = false;
  bool optimal = false;  // residuals within tolerance and both feasibility slacks ≥ −tolerance
  int support_size = 0;  // number of (i, j) entries, both triangles
  int rank = 0;
};

struct KktTolerances {
  double support_rel = 1e-6;  // |S_ij| > support_rel · max|S| enters Ω
  double rank_rel = 1e-6;     // eigenvalues > rank_rel · λ_max(L) span T
  double residual = 1e-6;
};

struct SolverResult {
  SparseLowRankPair estimate;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  KktReport kkt;
};

/// Entrywise soft threshold at t. With `penalize_diagonal` false the
/// diagonal passes through unchanged.
SymMat prox_l1(const SymMat& m, double t, bool penalize_diagonal = true);

/// argmin_{Z ⪰ 0} ½‖Z − m‖²_F + t tr Z: eigenvalues shifted down by t and
/// clamped at zero (an eigenvalue equal to t maps to 0).
SymMat prox_psd_trace(const SymMat& m, double t);

double objective(const SparseLowRankPair& pair, double lambda_n, double gamma, const SymMat& phi_n,
                 bool penalize_diagonal = true);

SolverResult solve_slr(const SymMat& phi_n, double lambda_n, double gamma, const SolverConfig& config = {},
                       const std::optional<SparseLowRankPair>& warm_start = std::nullopt);

KktReport verify_kkt(const SparseLowRankPair& pair, double lambda_n, double gamma, const SymMat& phi_n,
                     const KktTolerances& tol = {}, bool penalize_diagonal = true);

/// Warm-started solves along a strictly descending λ grid.
std::vector<SolverResult> solve_path(const SymMat& phi_n, const std::vector<double>& lambdas, double gamma,
                                     const SolverConfig& config = {});

/// Smallest (λγ, λ) for which (0, 0) solves the problem:
/// λγ ≥ ‖∇ℓ(0)‖∞ and λ ≥ λ_max(−∇ℓ(0)).
struct ZeroSolutionThreshold {
  double lambda_gamma;
  double lambda;
};
ZeroSolutionThreshold zero_solution_threshold(const SymMat& phi_n);

}  // namespace slr
