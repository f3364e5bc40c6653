#pragma once

// Conditional Gaussian model over {0,1}^d × ℝ^l with density
//   p(x, y) ∝ exp(xᵀSx + yᵀRx − ½ yᵀΛy),  Λ ≻ 0.
// Given x, y is Gaussian with mean Λ⁻¹Rx and covariance Λ⁻¹; integrating y
// out leaves an Ising model with interaction matrix S + ½RᵀΛ⁻¹R.

#include "slr/binary_dataset.hpp"
#include "slr/symmetric_matrix.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <vector>

namespace slr {

class LatentCGModel {
 public:
  /// Throws if Λ is not positive definite or its condition number exceeds
  /// `max_condition`.
  LatentCGModel(SymMat s, Eigen::MatrixXd r, SymMat lambda, double max_condition = 1e12);

  Index observed_dim() const { return s_.dim(); }
  Index latent_dim() const { return lambda_.dim(); }
  const SymMat& s() const { return s_; }
  const Eigen::MatrixXd& r() const { return r_; }
  const SymMat& lambda() const { return lambda_; }
  const Eigen::LLT<Eigen::MatrixXd>& lambda_factor() const { return llt_; }

 private:
  SymMat s_;
  Eigen::MatrixXd r_;
  SymMat lambda_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// L = ½ RᵀΛ⁻¹R.
SymMat marginal_interaction(const LatentCGModel& model);

/// S + ½ RᵀΛ⁻¹R, the interaction matrix of the binary marginal.
SymMat marginal_theta(const LatentCGModel& model);

struct ConditionalGaussian {
  Eigen::VectorXd mean;
  SymMat covariance;
};

ConditionalGaussian conditional_gaussian_params(const LatentCGModel& model, const BitVector& x);

struct FullSample {
  BitVector x;
  Eigen::VectorXd y;
};

/// Exact draws of (x, y): x from the Ising marginal, then y | x.
std::vector<FullSample> sample_full(const LatentCGModel& model, std::size_t n, std::uint64_t seed);

}  // namespace slr
