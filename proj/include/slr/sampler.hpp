#pragma once

#include "slr/binary_dataset.hpp"
#include "slr/symmetric_matrix.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace slr {

/// Inverse-CDF sampler over the 2^d enumerated states. The cumulative
/// distribution is built once and shared by all draws.
class ExactSampler {
 public:
  explicit ExactSampler(const SymMat& theta);

  int dim() const { return dim_; }
  State draw(std::mt19937_64& rng) const;
  const std::vector<double>& probabilities() const { return probabilities_; }

 private:
  int dim_;
  std::vector<double> probabilities_;
  std::vector<double> cdf_;
};

BinaryDataset exact_sample(const SymMat& theta, std::size_t n, std::uint64_t seed);

struct GibbsConfig {
  int burn_in = 1000;  // sweeps discarded before the first kept sample
  int thinning = 10;   // sweeps between kept samples
  std::uint64_t seed = 0;

  void validate() const;
};

/// P(x_i = 1 | x_{-i}) = logistic(Θ_ii + 2 Σ_{j≠i} Θ_ij x_j).
double gibbs_conditional(const SymMat& theta, State x, int i);
double gibbs_conditional(const SymMat& theta, const BitVector& x, int i);

/// Systematic-scan Gibbs chain started from a uniformly random state.
BinaryDataset gibbs_sample(const SymMat& theta, std::size_t n, const GibbsConfig& config);

/// ½ Σ_x |freq(x) − p(x)|.
double empirical_vs_exact_tv(const BinaryDataset& data, const SymMat& theta);

/// Empirical state frequencies indexed by packed state (d within the cap).
std::vector<double> state_frequencies(const BinaryDataset& data);

}  // namespace slr
