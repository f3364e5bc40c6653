#pragma once

// Numerical check of maximum-entropy / regularized-likelihood duality.
//
// Primal:  max_p H(p)  s.t.  ‖E_p[Φ] − Φⁿ‖∞ ≤ c  and  ‖E_p[Φ] − Φⁿ‖ ≤ λ.
// Dual:    max ℓ⁺(S + L₁ − L₂) − c‖S‖₁ − λ tr(L₁ + L₂)  s.t.  L₁, L₂ ⪰ 0,
// where ℓ⁺(Θ) = ⟨Θ, Φⁿ⟩ − a(Θ) is the positive log-likelihood. Dropping the
// constraint E_p[Φ] − Φⁿ ⪯ λI removes L₂.
//
// Sign convention: the dual value g reported here uses ℓ⁺ (so g ≤ 0). The
// solver module minimizes −g; strong duality reads H(p*) = −g*.

#include "slr/solver.hpp"
#include "slr/symmetric_matrix.hpp"

#include <vector>

namespace slr {

class DiscreteDistribution {
 public:
  DiscreteDistribution(int dim, std::vector<double> probabilities);

  int dim() const { return dim_; }
  const std::vector<double>& probabilities() const { return p_; }
  double operator[](std::size_t s) const { return p_[s]; }

 private:
  int dim_;
  std::vector<double> p_;
};

/// p(x) = exp(⟨Θ, Φ(x)⟩ − a(Θ)).
DiscreteDistribution primal_from_dual(const SymMat& theta);

/// −Σ p log p with 0 log 0 = 0.
double entropy(const DiscreteDistribution& p);

/// E_p[Φ].
SymMat expected_moments(const DiscreteDistribution& p);

struct ConstraintResiduals {
  double inf_violation = 0.0;        // max(0, ‖E_p[Φ] − Φⁿ‖∞ − c)
  double spec_violation = 0.0;       // max(0, ‖E_p[Φ] − Φⁿ‖ − λ)
  double one_sided_violation = 0.0;  // max(0, λ_max(Φⁿ − E_p[Φ]) − λ)
};

ConstraintResiduals constraint_residuals(const DiscreteDistribution& p, const SymMat& phi_n, double c, double lambda);

class TwoSidedDualSolution {
 public:
  TwoSidedDualSolution(SymMat s, SymMat l1, SymMat l2);

  Index dim() const { return s_.dim(); }
  const SymMat& s() const { return s_; }
  const SymMat& l1() const { return l1_; }
  const SymMat& l2() const { return l2_; }
  SymMat theta() const { return s_ + l1_ - l2_; }

 private:
  SymMat s_;
  SymMat l1_;
  SymMat l2_;
};

struct DualKkt {
  double s_residual = 0.0;   // max over supp S of |(Φⁿ − E)_ij − c sign(S_ij)|
  double s_slack = 0.0;      // c − max off supp S of |(Φⁿ − E)_ij|
  double l1_residual = 0.0;  // ‖P_{T₁}(D) − λ U₁U₁ᵀ‖, D = Φⁿ − E
  double l1_slack = 0.0;     // λ − λ_max(P_{T₁⊥}(D))
  double l2_residual = 0.0;  // ‖P_{T₂}(−D) − λ U₂U₂ᵀ‖
  double l2_slack = 0.0;     // λ − λ_max(P_{T₂⊥}(−D))
};

struct TwoSidedDualResult {
  TwoSidedDualSolution solution;
  double dual_objective = 0.0;  // g, positive log-likelihood convention
  int iterations = 0;
  bool converged = false;
  DualKkt kkt;
};

/// g(S, L₁, L₂) = ℓ⁺(S + L₁ − L₂) − c‖S‖₁ − λ tr(L₁ + L₂).
double dual_objective(const TwoSidedDualSolution& dual, const SymMat& phi_n, double c, double lambda);

DualKkt dual_kkt(const TwoSidedDualSolution& dual, const SymMat& phi_n, double c, double lambda,
                 const KktTolerances& tol = {});

/// Three-block proximal gradient on −g.
TwoSidedDualResult solve_two_sided_dual(const SymMat& phi_n, double c, double lambda, const SolverConfig& config = {});

/// Two-block variant (L₂ ≡ 0) for the one-sided spectral constraint.
TwoSidedDualResult solve_one_sided_dual(const SymMat& phi_n, double c, double lambda, const SolverConfig& config = {});

struct DualityReport {
  bool one_sided = false;
  double entropy = 0.0;                // H(p), p = primal_from_dual(S + L₁ − L₂)
  double dual_objective = 0.0;         // g
  double gap = 0.0;                    // |H(p) + g|
  double lagrangian_correction = 0.0;  // ⟨Θ, Φⁿ − E_p[Φ]⟩ − c‖S‖₁ − λ tr(L₁ + L₂), equals H(p) + g
  ConstraintResiduals residuals;
  double slackness_s = 0.0;            // max_ij |S_ij| · |c − sign(S_ij)(Φⁿ − E)_ij|
  double slackness_l1 = 0.0;           // ⟨L₁, λI − (Φⁿ − E)⟩
  double slackness_l2 = 0.0;           // ⟨L₂, λI − (E − Φⁿ)⟩
  bool converged = true;
};

DualityReport duality_report(const TwoSidedDualSolution& dual, const SymMat& phi_n, double c, double lambda,
                             bool one_sided = false);

}  // namespace slr
