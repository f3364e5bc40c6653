#pragma once

// Synthetic experiments: ground-truth generation, single fits with recovery
// metrics, sweeps over the sample size and gradient concentration.

#include "slr/io.hpp"
#include "slr/latent_cg.hpp"
#include "slr/solver.hpp"
#include "slr/symmetric_matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slr {

/// λₙ = c2_scale / ξ̂ · √(κ d log d / n) with ξ̂ the upper bound on ξ(T*).
struct LambdaRule {
  double c2_scale = 1.0;
  double kappa = 1.0;
};

struct RecoveryThresholds {
  double support_tol = 1e-3;  // |S_ij| > support_tol counts as an edge
  double rank_tol = 1e-3;     // eigenvalues of L above rank_tol count toward the rank
};

struct ExperimentConfig {
  int d = 10;
  int l = 1;
  std::vector<std::size_t> n_grid{1000, 10000, 100000};
  double support_density = 0.1;
  double s_lo = 0.5;
  double s_hi = 1.0;
  double r_scale = 1.0;
  LambdaRule lambda_rule;
  std::optional<double> gamma;  // empty: "auto"
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Fixes the ground truth; `seeds` then only vary the samples. When empty
  // each seed draws its own truth.
  std::optional<std::uint64_t> truth_seed;
  SolverConfig solver;
  RecoveryThresholds thresholds;
  double nu = 0.5;               // for the γ-range used by "auto"
  bool population = false;       // fit on exact Φ* instead of samples

  /// Throws io::ValidationError naming the offending field.
  void validate() const;
};

ExperimentConfig experiment_config_from_json(const io::Json& j);
io::Json experiment_config_to_json(const ExperimentConfig& config);

struct GroundTruth {
  SymMat s_star;
  LatentCGModel model;
  SymMat l_star;
  int edges = 0;            // off-diagonal pairs in supp S*
  bool degenerate = false;  // zero support requested (density 0)
  bool forced_edge = false; // the random draw was empty and one edge was inserted
};

/// S*: symmetric Erdős–Rényi support over i < j with density support_density,
/// magnitudes uniform in [s_lo, s_hi] with random sign, zero diagonal.
/// R: l×d i.i.d. N(0, r_scale²). Λ = I.
GroundTruth generate_truth(const ExperimentConfig& config, std::uint64_t seed);

struct RecoveryMetrics {
  double support_precision = 1.0;
  double support_recall = 1.0;
  bool sign_consistent = true;
  int rank_true = 0;
  int rank_est = 0;
  bool rank_match = true;
  double gamma_norm_error = 0.0;
  double spectral_error_compound = 0.0;  // ‖(Sₙ + Lₙ) − (S* + L*)‖

  /// Exact off-diagonal support, consistent signs and the right rank.
  bool recovered() const {
    return support_precision == 1.0 && support_recall == 1.0 && sign_consistent && rank_match;
  }
};

/// Support and sign metrics use off-diagonal pairs i < j.
RecoveryMetrics recovery_metrics(const SparseLowRankPair& estimate, const SymMat& s_star, const SymMat& l_star,
                                 double gamma, const RecoveryThresholds& thresholds);

/// Upper bound min(1, 2·coherence) on ξ(T(L*)); 1 when L* = 0.
double xi_hat(const SymMat& l_star);

double lambda_schedule(const LambdaRule& rule, int d, std::size_t n, double xi_hat);

struct DiagnoseOptions {
  double nu = 0.5;
  double epsilon = 0.1;
  int sample_count = 4;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::optional<double> lambda_n;  // enables the gap check
  double c_s = 1.0;
  double c_l = 1.0;
  double zero_tol = 1e-9;
  bool stability = true;  // Hessian-based constants (needs d within the enumeration cap)
};

struct GeometryReport {
  io::Json json;
  std::optional<GammaRange> gamma_range;  // present when stability constants are available
};

/// Tangent-space diagnostics of (S*, L*): μ(Ω), coherence, ξ bracket, and,
/// with `stability`, the Hessian constants at Θ* = S* + L* together with the
/// assumption verdicts.
GeometryReport geometry_report(const SymMat& s_star, const SymMat& l_star, const DiagnoseOptions& options);

/// "auto": geometric mean of the γ-range when it is feasible with
/// 0 < γ_min ≤ γ_max < ∞, otherwise 1.
double auto_gamma(const std::optional<GammaRange>& range);

struct SingleRun {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double lambda_n = 0.0;
  double gamma = 0.0;
  RecoveryMetrics metrics;
  bool converged = false;
  bool kkt_ok = false;
  io::Json diagnostics;
};

SingleRun run_single(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);

struct SweepAggregate {
  std::size_t n = 0;
  double median_gamma_norm_error = 0.0;
  double recovery_rate = 0.0;
  double median_lambda = 0.0;
};

struct SweepTable {
  std::vector<SingleRun> rows;  // sorted by (n, seed)
  std::vector<SweepAggregate> aggregates;
  std::optional<double> slope;  // log-log slope of median error vs n; needs ≥ 2 grid points

  std::string rows_csv() const;
  std::string aggregates_csv() const;
};

SweepTable consistency_sweep(const ExperimentConfig& config);

struct ConcentrationRow {
  std::size_t n = 0;
  std::vector<double> values;  // ‖Φⁿ − Φ*‖ per trial
  double median = 0.0;
  double p90 = 0.0;
};

struct ConcentrationTable {
  int trials = 0;
  std::vector<ConcentrationRow> rows;
  std::optional<double> slope;  // log-log slope of the median vs n

  /// With one trial: "n,value"; otherwise "n,trials,median,p90".
  std::string csv() const;
};

ConcentrationTable concentration_experiment(const SymMat& theta, const std::vector<std::size_t>& n_grid, int trials,
                                            std::uint64_t seed);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);
/// Linear interpolation between order statistics.
double quantile(std::vector<double> v, double q);

}  // namespace slr
