#include "slr/latent_cg.hpp"

#include "slr/ising.hpp"
#include "slr/operator_norm.hpp"
#include "slr/sampler.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace slr {

LatentCGModel::LatentCGModel(SymMat s, Eigen::MatrixXd r, SymMat lambda, double max_condition)
    : s_(std::move(s)), r_(std::move(r)), lambda_(std::move(lambda)) {
  if (r_.cols() != s_.dim()) {
    throw std::invalid_argument("LatentCGModel: R has " + std::to_string(r_.cols()) +
                                " columns, expected " + std::to_string(s_.dim()));
  }
  if (r_.rows() != lambda_.dim()) {
    throw std::invalid_argument("LatentCGModel: R has " + std::to_string(r_.rows()) +
                                " rows, expected " + std::to_string(lambda_.dim()));
  }
  const auto ev = eigenvalues(lambda_);
  if (!(ev(0) > 0.0)) throw std::invalid_argument("LatentCGModel: Lambda is not positive definite");
  if (ev(ev.size() - 1) / ev(0) > max_condition) {
    throw std::invalid_argument("LatentCGModel: Lambda is numerically singular");
  }
  llt_.compute(lambda_.matrix());
  if (llt_.info() != Eigen::Success) {
    throw std::invalid_argument("LatentCGModel: Cholesky factorization of Lambda failed");
  }
}

SymMat marginal_interaction(const LatentCGModel& model) {
  const Eigen::MatrixXd x = model.lambda_factor().solve(model.r());
  return SymMat::symmetrize(0.5 * model.r().transpose() * x);
}

SymMat marginal_theta(const LatentCGModel& model) { return model.s() + marginal_interaction(model); }

ConditionalGaussian conditional_gaussian_params(const LatentCGModel& model, const BitVector& x) {
  if (static_cast<Index>(x.size()) != model.observed_dim()) {
    throw std::invalid_argument("conditional_gaussian_params: bit-vector length does not match d");
  }
  Eigen::VectorXd xv(model.observed_dim());
  for (Index i = 0; i < xv.size(); ++i) {
    if (x[i] > 1) throw std::invalid_argument("conditional_gaussian_params: coordinate is not 0/1");
    xv(i) = x[i];
  }
  const auto& llt = model.lambda_factor();
  Eigen::VectorXd mean = llt.solve(model.r() * xv);
  // Explicit inverse is only for reporting.
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(model.latent_dim(), model.latent_dim()));
  return {std::move(mean), SymMat::symmetrize(inv)};
}

std::vector<FullSample> sample_full(const LatentCGModel& model, std::size_t n, std::uint64_t seed) {
  std::vector<FullSample> out;
  if (n == 0) return out;
  const ExactSampler sampler(marginal_theta(model));
  auto x_rng = derived_rng(seed, 0);
  auto y_rng = derived_rng(seed, 1);
  std::normal_distribution<double> normal;
  const auto& llt = model.lambda_factor();
  const Index d = model.observed_dim();
  const Index l = model.latent_dim();
  out.reserve(n);
  Eigen::VectorXd xv(d);
  Eigen::VectorXd z(l);
  for (std::size_t k = 0; k < n; ++k) {
    const State s = sampler.draw(x_rng);
    for (Index i = 0; i < d; ++i) xv(i) = bit(s, static_cast<int>(i)) ? 1.0 : 0.0;
    for (Index j = 0; j < l; ++j) z(j) = normal(y_rng);
    // Λ = CCᵀ, so C⁻ᵀz has covariance Λ⁻¹.
    Eigen::VectorXd y = llt.solve(model.r() * xv) + llt.matrixU().solve(z);
    out.push_back({unpack(s, static_cast<int>(d)), std::move(y)});
  }
  return out;
}

}  // namespace slr
