#pragma once

// Exact likelihood machinery for pairwise Ising models on {0,1}^d,
// p(x) = exp(⟨Θ, xxᵀ⟩ - a(Θ)), by enumeration of all 2^d states.
//
// Energies use the full double sum ⟨Θ, xxᵀ⟩ = Σ_ij Θ_ij x_i x_j, so an
// off-diagonal interaction is counted twice and Θ_ii acts as a linear field.
//
// All reductions run serially in ascending packed-state order, which makes
// every result bit-reproducible.

#include "slr/binary_dataset.hpp"
#include "slr/symmetric_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slr {

inline constexpr int kEnumerationCap = 20;

inline void check_enumerable(Index dim, int cap = kEnumerationCap) {
  if (dim > cap) {
    throw std::domain_error("dimension " + std::to_string(dim) + " exceeds the enumeration cap " +
                            std::to_string(cap));
  }
}

inline std::size_t state_count(Index dim) { return std::size_t{1} << dim; }

template <typename Scalar>
SymmetricMatrix<Scalar> suff_stats(const BitVector& x, Index dim) {
  if (static_cast<Index>(x.size()) != dim) {
    throw std::invalid_argument("suff_stats: bit-vector has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dim));
  }
  typename SymmetricMatrix<Scalar>::Dense m(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    if (x[i] > 1) throw std::invalid_argument("suff_stats: coordinate is not 0/1");
    for (Index j = 0; j < dim; ++j) m(i, j) = Scalar(x[i] * x[j]);
  }
  return SymmetricMatrix<Scalar>::from(m);
}

inline SymMat suff_stats(const BitVector& x) { return suff_stats<double>(x, static_cast<Index>(x.size())); }

/// Φⁿ = (1/n) Σ_k x⁽ᵏ⁾x⁽ᵏ⁾ᵀ.
template <typename Scalar = double>
SymmetricMatrix<Scalar> empirical_second_moment(const BinaryDataset& data) {
  if (data.empty()) throw std::invalid_argument("empirical_second_moment: empty dataset");
  const int d = data.dim();
  // Integer pair counts keep the result exact up to the final division.
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(d) * d, 0);
  std::vector<int> active;
  active.reserve(d);
  for (State s : data.states()) {
    active.clear();
    for (State r = s; r; r &= r - 1) active.push_back(__builtin_ctzll(r));
    for (int i : active)
      for (int j : active) ++counts[static_cast<std::size_t>(i) * d + j];
  }
  const Scalar n = Scalar(data.count());
  typename SymmetricMatrix<Scalar>::Dense m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = Scalar(counts[static_cast<std::size_t>(i) * d + j]) / n;
  return SymmetricMatrix<Scalar>::from(m);
}

/// ⟨Θ, Φ(x)⟩ for a packed state.
template <typename Scalar>
Scalar state_energy(const SymmetricMatrix<Scalar>& theta, State s) {
  Scalar e(0);
  for (State r = s; r; r &= r - 1) {
    const int i = __builtin_ctzll(r);
    e += theta(i, i);
    for (State q = r & (r - 1); q; q &= q - 1) e += Scalar(2) * theta(i, __builtin_ctzll(q));
  }
  return e;
}

/// ⟨Θ, Φ(x)⟩ for every state, indexed by packed state.
template <typename Scalar>
std::vector<Scalar> state_energies(const SymmetricMatrix<Scalar>& theta) {
  const Index d = theta.dim();
  check_enumerable(d);
  const std::size_t n = state_count(d);
  std::vector<Scalar> e(n);
  e[0] = Scalar(0);
  for (std::size_t s = 1; s < n; ++s) {
    const int k = 63 - __builtin_clzll(s);
    const std::size_t rest = s ^ (std::size_t{1} << k);
    Scalar acc = theta(k, k);
    for (std::size_t r = rest; r; r &= r - 1) acc += Scalar(2) * theta(k, __builtin_ctzll(r));
    e[s] = e[rest] + acc;
  }
  return e;
}

template <typename Scalar>
Scalar log_sum_exp(std::span<const Scalar> values) {
  const Scalar mx = *std::max_element(values.begin(), values.end());
  Scalar acc(0);
  for (Scalar v : values) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

/// a(Θ) = log Σ_x exp⟨Θ, Φ(x)⟩.
template <typename Scalar>
Scalar log_partition(const SymmetricMatrix<Scalar>& theta) {
  const auto e = state_energies(theta);
  return log_sum_exp<Scalar>(e);
}

template <typename Scalar>
std::vector<Scalar> state_probabilities(const SymmetricMatrix<Scalar>& theta) {
  auto e = state_energies(theta);
  const Scalar a = log_sum_exp<Scalar>(e);
  for (Scalar& v : e) v = std::exp(v - a);
  return e;
}

template <typename Scalar>
Scalar state_log_prob(const SymmetricMatrix<Scalar>& theta, const BitVector& x) {
  if (static_cast<Index>(x.size()) != theta.dim()) {
    throw std::invalid_argument("state_log_prob: bit-vector length does not match dim");
  }
  return state_energy(theta, pack(x)) - log_partition(theta);
}

/// Σ_s w_s Φ(x_s) for per-state weights w indexed by packed state.
template <typename Scalar>
SymmetricMatrix<Scalar> weighted_second_moment(std::span<const Scalar> w, Index dim) {
  if (w.size() != state_count(dim)) {
    throw std::invalid_argument("weighted_second_moment: weight count is not 2^d");
  }
  typename SymmetricMatrix<Scalar>::Dense m = SymmetricMatrix<Scalar>::Dense::Zero(dim, dim);
  for (std::size_t s = 1; s < w.size(); ++s) {
    const Scalar ws = w[s];
    for (std::size_t r = s; r; r &= r - 1) {
      const int i = __builtin_ctzll(r);
      m(i, i) += ws;
      for (std::size_t q = r & (r - 1); q; q &= q - 1) m(__builtin_ctzll(q), i) += ws;
    }
  }
  for (Index j = 0; j < dim; ++j)
    for (Index i = j + 1; i < dim; ++i) m(j, i) = m(i, j);
  return SymmetricMatrix<Scalar>::from(m);
}

/// Φ*(Θ) = E_Θ[xxᵀ].
template <typename Scalar>
SymmetricMatrix<Scalar> expected_second_moment(const SymmetricMatrix<Scalar>& theta) {
  const auto p = state_probabilities(theta);
  return weighted_second_moment<Scalar>(p, theta.dim());
}

/// ℓ(Θ) = a(Θ) − ⟨Θ, Φⁿ⟩, the average negative log-likelihood.
template <typename Scalar>
Scalar neg_log_likelihood(const SymmetricMatrix<Scalar>& theta, const SymmetricMatrix<Scalar>& phi_n) {
  theta.check_same_dim(phi_n);
  return log_partition(theta) - inner(theta, phi_n);
}

/// ∇ℓ(Θ) = Φ*(Θ) − Φⁿ.
template <typename Scalar>
SymmetricMatrix<Scalar> nll_gradient(const SymmetricMatrix<Scalar>& theta,
                                     const SymmetricMatrix<Scalar>& phi_n) {
  theta.check_same_dim(phi_n);
  return expected_second_moment(theta) - phi_n;
}

template <typename Scalar>
struct LikelihoodEvaluation {
  Scalar value;
  SymmetricMatrix<Scalar> gradient;
  SymmetricMatrix<Scalar> moments;  // Φ*(Θ)
};

/// Value and gradient of ℓ from a single enumeration.
template <typename Scalar>
LikelihoodEvaluation<Scalar> evaluate_likelihood(const SymmetricMatrix<Scalar>& theta,
                                                 const SymmetricMatrix<Scalar>& phi_n) {
  theta.check_same_dim(phi_n);
  auto e = state_energies(theta);
  const Scalar a = log_sum_exp<Scalar>(e);
  for (Scalar& v : e) v = std::exp(v - a);
  auto moments = weighted_second_moment<Scalar>(e, theta.dim());
  auto grad = moments - phi_n;
  return {a - inner(theta, phi_n), std::move(grad), std::move(moments)};
}

/// H(Θ)[M] = Cov(⟨Φ, M⟩, Φ), the Hessian of ℓ applied to M.
template <typename Scalar>
SymmetricMatrix<Scalar> hessian_vector_product(const SymmetricMatrix<Scalar>& theta,
                                               const SymmetricMatrix<Scalar>& m) {
  theta.check_same_dim(m);
  const auto p = state_probabilities(theta);
  const auto v = state_energies(m);
  Scalar mean(0);
  for (std::size_t s = 0; s < p.size(); ++s) mean += p[s] * v[s];
  std::vector<Scalar> w(p.size());
  for (std::size_t s = 0; s < p.size(); ++s) w[s] = p[s] * (v[s] - mean);
  return weighted_second_moment<Scalar>(w, theta.dim());
}

/// Cov(vec Φ) as a d²×d² matrix; row/column index i + d·j addresses entry (i, j).
/// Acting on vec(M) it reproduces hessian_vector_product.
template <typename Scalar>
typename SymmetricMatrix<Scalar>::Dense explicit_hessian(const SymmetricMatrix<Scalar>& theta) {
  const Index d = theta.dim();
  check_enumerable(d, 10);
  using Dense = typename SymmetricMatrix<Scalar>::Dense;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const auto p = state_probabilities(theta);
  const Vec mu = Eigen::Map<const Vec>(expected_second_moment(theta).matrix().data(), d * d);
  Dense h = Dense::Zero(d * d, d * d);
  Vec f(d * d);
  for (std::size_t s = 0; s < p.size(); ++s) {
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) f(i + d * j) = Scalar(bit(s, int(i)) && bit(s, int(j)));
    f -= mu;
    h.noalias() += p[s] * f * f.transpose();
  }
  return h;
}

/// Ising model with its log-partition computed once at construction.
template <typename Scalar>
class IsingModel {
 public:
  explicit IsingModel(SymmetricMatrix<Scalar> theta)
      : theta_(std::move(theta)), log_partition_(log_partition(theta_)) {}

  Index dim() const { return theta_.dim(); }
  const SymmetricMatrix<Scalar>& theta() const { return theta_; }
  Scalar log_partition_value() const { return log_partition_; }

  Scalar log_prob(State s) const { return state_energy(theta_, s) - log_partition_; }
  Scalar log_prob(const BitVector& x) const {
    if (static_cast<Index>(x.size()) != dim()) {
      throw std::invalid_argument("IsingModel: bit-vector length does not match dim");
    }
    return log_prob(pack(x));
  }

 private:
  SymmetricMatrix<Scalar> theta_;
  Scalar log_partition_;
};

struct OperatorNormEstimate {
  double value = 0.0;
  bool converged = false;
  bool heuristic = true;  // certified lower bound on the exact norm
};

/// Lower bound on max_{‖M‖=1} ‖H(Θ)M‖ (spectral norms) by alternating
/// maximization with restarts.
OperatorNormEstimate hessian_operator_norm(const SymMat& theta, double tol = 1e-10, int restarts = 8,
                                           std::uint64_t seed = 0);

}  // namespace slr
