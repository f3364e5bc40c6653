#pragma once

#include "slr/symmetric_matrix.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace slr {

using LinearMap = std::function<SymMat(const SymMat&)>;

struct SpectralNormSearch {
  int restarts = 32;
  int max_iterations = 200;
  double tol = 1e-12;
  std::uint64_t seed = 0;
};

struct SpectralNormBound {
  double value = 0.0;
  SymMat argmax{1};
  bool converged = false;
};

/// Lower bound on max_{‖M‖ ≤ 1} ‖A M‖ in spectral norms for a linear map A on
/// Sym(d) with Frobenius adjoint `adjoint`. Alternates between the dual
/// certificate ±uuᵀ of ‖AM‖ and the spectral sign of A*(±uuᵀ); each step is
/// non-decreasing. Restart 0 starts from the identity, the rest from random
/// spectral-sign matrices.
SpectralNormBound spectral_norm_lower_bound(const LinearMap& apply, const LinearMap& adjoint, Index dim,
                                            const SpectralNormSearch& search);

/// Deterministic per-restart generator derived from a master seed.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream);

/// Symmetric matrix with i.i.d. standard normal upper triangle.
SymMat random_symmetric(Index dim, std::mt19937_64& rng);

}  // namespace slr
