#pragma once

// Tangent spaces of the sparse and low-rank matrix varieties and the
// constants that measure how well they separate.
//
// Quantities defined by nonconvex maximizations (twisting, the lower bound on
// ξ(T), the T-indexed stability constants) are estimated by local search with
// restarts. Maximum estimates are lower bounds on the true maximum; minimum
// estimates are upper bounds on the true minimum.

#include "slr/operator_norm.hpp"
#include "slr/symmetric_matrix.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace slr {

/// Symmetric index set Ω; (i, j) and (j, i) are identified.
class SupportSet {
 public:
  explicit SupportSet(Index dim);

  static SupportSet full(Index dim);
  static SupportSet diagonal(Index dim);

  Index dim() const { return mask_.rows(); }
  void insert(Index i, Index j);
  bool contains(Index i, Index j) const { return mask_(i, j); }
  /// Number of (i, j) entries counting both triangles.
  int size() const { return static_cast<int>(mask_.count()); }
  bool empty() const { return size() == 0; }
  /// Upper-triangular representatives (i ≤ j).
  std::vector<std::pair<Index, Index>> free_positions() const;
  /// Maximum number of support entries in a row.
  int max_degree() const;

 private:
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
};

/// d×r matrix U with orthonormal columns.
class LowRankBasis {
 public:
  explicit LowRankBasis(Index dim);
  explicit LowRankBasis(Eigen::MatrixXd u);

  Index dim() const { return u_.rows(); }
  Index rank() const { return u_.cols(); }
  const Eigen::MatrixXd& u() const { return u_; }
  /// P_U = UUᵀ.
  Eigen::MatrixXd projector() const { return u_ * u_.transpose(); }

 private:
  Eigen::MatrixXd u_;
};

struct TangentPair {
  SupportSet omega;
  LowRankBasis t_basis;
};

SupportSet sparse_tangent(const SymMat& s, double tol);

/// Eigenvectors of l whose |eigenvalue| exceeds rank_tol · max|eigenvalue|.
LowRankBasis lowrank_tangent(const SymMat& l, double rank_tol = 1e-9);

SymMat project_omega(const SupportSet& omega, const SymMat& m);
SymMat project_omega_perp(const SupportSet& omega, const SymMat& m);

/// P_T N = P_U N + N P_U − P_U N P_U.
SymMat project_t(const LowRankBasis& basis, const SymMat& n);
/// P_{T⊥} N = (I − P_U) N (I − P_U).
SymMat project_t_perp(const LowRankBasis& basis, const SymMat& n);

/// max_i ‖P_U e_i‖.
double coherence(const LowRankBasis& basis);

/// Lower bound on ρ(T₁, T₂) = max_{‖M‖=1} ‖(P_{T₁} − P_{T₂})M‖.
double twisting(const LowRankBasis& b1, const LowRankBasis& b2, int restarts = 32, std::uint64_t seed = 0);

struct MuOmega {
  std::optional<double> exact;  // present when the sign patterns were enumerated
  double lower = 0.0;
  double upper = 0.0;           // maximum row degree
};

/// μ(Ω) = max ‖N‖ over N ∈ Ω with ‖N‖∞ ≤ 1, attained at a ±1 sign pattern.
MuOmega mu_omega(const SupportSet& omega, int max_free_positions = 20, int random_patterns = 4096,
                 std::uint64_t seed = 0);

struct XiBracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// ξ(T) = max ‖M‖∞ over M ∈ T with ‖M‖ = 1: upper = min(1, 2·coherence),
/// lower from local search.
XiBracket xi_t(const LowRankBasis& basis, int restarts = 32, std::uint64_t seed = 0);

struct StabilityEstimates {
  double alpha_omega = 0.0;
  double alpha_t = 0.0;
  double delta_omega = 0.0;
  double delta_t = 0.0;
  double beta_omega = 0.0;
  double beta_t = 0.0;
  double epsilon = 0.0;
  std::string method_note;
  int sample_count = 0;
  bool heuristic = true;
  bool has_omega = false;  // Ω non-empty
  bool has_t = false;      // rank ≥ 1

  /// Minimum over the non-empty spaces; 0 when both are empty.
  double alpha() const {
    if (has_omega && has_t) return std::min(alpha_omega, alpha_t);
    return has_omega ? alpha_omega : (has_t ? alpha_t : 0.0);
  }
  double delta() const { return std::max(delta_omega, delta_t); }
  double beta() const { return std::max(beta_omega, beta_t); }
};

/// Minimum gains, maximum effects and β-constants of a self-adjoint operator
/// on Sym(d). `base` is the low-rank point whose tangent space the basis
/// describes; it supplies σ_min for sizing perturbations. If `base` is absent
/// the basis is taken with unit eigenvalues.
StabilityEstimates stability_estimates(const LinearMap& hessian, const TangentPair& pair, double epsilon,
                                       int sample_count, int restarts, std::uint64_t seed,
                                       const std::optional<SymMat>& base = std::nullopt);

struct GammaRange {
  double gamma_min = 0.0;
  double gamma_max = 0.0;
  bool feasible = false;
  double product = 0.0;        // μ ξ
  double product_bound = 0.0;  // (1/6) (να / (β(2 − ν)))²
};

GammaRange gamma_range(double alpha, double beta, double nu, double xi, double mu);

struct GapCheck {
  bool s_ok = false;
  bool sigma_ok = false;
  double s_min = 0.0;
  double sigma_min = 0.0;
  double s_threshold = 0.0;
  double sigma_threshold = 0.0;
  bool s_vacuous = false;
  bool sigma_vacuous = false;
};

/// ξ = 0 is accepted only for a zero L*, whose check is vacuous.
GapCheck gap_check(const SymMat& s_star, const SymMat& l_star, double lambda_n, double mu, double xi, double c_s,
                   double c_l, double zero_tol = 1e-12);

/// ‖(S, L)‖_γ = max(‖S‖∞ / γ, ‖L‖).
double gamma_norm(const SymMat& s, const SymMat& l, double gamma);

/// (ξ(T₁) + ρ) / (1 − ρ).
double twisted_xi_bound(double xi_t1, double rho);

struct PerturbationCheck {
  bool applicable = false;
  bool twist_bound_ok = false;
  bool normal_bound_ok = false;
  double sigma = 0.0;
  double delta_norm = 0.0;
  double twist_estimate = 0.0;
  double twist_bound = 0.0;
  double normal_component = 0.0;
  double normal_bound = 0.0;
};

/// Checks ρ(T(M+Δ), T(M)) ≤ 2‖Δ‖/σ and ‖P_{T(M)⊥}Δ‖ ≤ ‖Δ‖²/σ when
/// ‖Δ‖ ≤ σ/8 and rank(M + Δ) = rank(M).
PerturbationCheck perturbation_bounds_check(const SymMat& l, const SymMat& delta, double rank_tol = 1e-9,
                                            int restarts = 32, std::uint64_t seed = 0);

}  // namespace slr
