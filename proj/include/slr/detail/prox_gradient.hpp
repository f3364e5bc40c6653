#pragma once

#include "slr/solver.hpp"

#include <functional>
#include <vector>

namespace slr::detail {

// One block X_k of a composite problem  min ℓ(Σ_k sign_k X_k) + Σ_k h_k(X_k).
struct Block {
  double sign = 1.0;
  std::function<SymMat(const SymMat&, double)> prox;    // prox of step·h_k
  std::function<double(const SymMat&)> penalty;         // h_k
  std::function<double(const SymMat&)> residual_norm;   // norm for the stopping test
};

struct ProxGradientOutcome {
  std::vector<SymMat> x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

ProxGradientOutcome prox_gradient(const SymMat& phi_n, const std::vector<Block>& blocks, std::vector<SymMat> x0,
                                  const SolverConfig& config);

}  // namespace slr::detail
