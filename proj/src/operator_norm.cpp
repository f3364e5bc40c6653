#include "slr/operator_norm.hpp"

#include "slr/ising.hpp"

#include <cmath>

namespace slr {

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5f3759dfU};
  return std::mt19937_64(seq);
}

SymMat random_symmetric(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  SymMat m(dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = j; i < dim; ++i) m.set(i, j, normal(rng));
  return m;
}

namespace {

// Largest-magnitude eigenpair of a symmetric matrix.
struct TopEigen {
  double value;
  Eigen::VectorXd vector;
};

TopEigen top_eigen(const SymMat& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix());
  const Index last = a.dim() - 1;
  const Index k = std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(last)) ? 0 : last;
  return {es.eigenvalues()(k), es.eigenvectors().col(k)};
}

}  // namespace

SpectralNormBound spectral_norm_lower_bound(const LinearMap& apply, const LinearMap& adjoint, Index dim,
                                            const SpectralNormSearch& search) {
  SpectralNormBound best;
  best.argmax = SymMat(dim);
  bool all_converged = true;
  for (int r = 0; r < std::max(1, search.restarts); ++r) {
    SymMat m = SymMat::identity(dim);
    if (r > 0) {
      auto rng = derived_rng(search.seed, static_cast<std::uint64_t>(r));
      m = spectral_sign(random_symmetric(dim, rng));
    }
    double value = spectral_norm(apply(m));
    bool converged = false;
    for (int it = 0; it < search.max_iterations; ++it) {
      const TopEigen top = top_eigen(apply(m));
      const double s = top.value < 0 ? -1.0 : 1.0;
      const SymMat w = SymMat::symmetrize(s * top.vector * top.vector.transpose());
      const SymMat g = adjoint(w);
      if (max_abs(g) == 0.0) {
        converged = true;
        break;
      }
      SymMat next = spectral_sign(g);
      const double next_value = spectral_norm(apply(next));
      if (next_value <= value + search.tol * std::max(1.0, value)) {
        if (next_value > value) {
          value = next_value;
          m = std::move(next);
        }
        converged = true;
        break;
      }
      value = next_value;
      m = std::move(next);
    }
    all_converged = all_converged && converged;
    if (value > best.value || r == 0) {
      best.value = value;
      best.argmax = m;
    }
  }
  best.converged = all_converged;
  return best;
}

OperatorNormEstimate hessian_operator_norm(const SymMat& theta, double tol, int restarts, std::uint64_t seed) {
  check_enumerable(theta.dim());
  const LinearMap h = [&theta](const SymMat& m) { return hessian_vector_product(theta, m); };
  SpectralNormSearch search;
  search.restarts = restarts;
  search.tol = tol;
  search.seed = seed;
  const auto bound = spectral_norm_lower_bound(h, h, theta.dim(), search);
  return {bound.value, bound.converged, true};
}

}  // namespace slr
