#include "slr/sampler.hpp"

#include "slr/ising.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace slr {

ExactSampler::ExactSampler(const SymMat& theta)
    : dim_(static_cast<int>(theta.dim())), probabilities_(state_probabilities(theta)) {
  cdf_.resize(probabilities_.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < probabilities_.size(); ++s) {
    acc += probabilities_[s];
    cdf_[s] = acc;
  }
  // Draws land in [0, cdf.back()), so rounding in the running sum cannot
  // push an index past the last state.
}

State ExactSampler::draw(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, cdf_.back());
  const double u = unif(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  return static_cast<State>(idx);
}

BinaryDataset exact_sample(const SymMat& theta, std::size_t n, std::uint64_t seed) {
  const ExactSampler sampler(theta);
  std::mt19937_64 rng(seed);
  BinaryDataset data(sampler.dim());
  data.reserve(n);
  for (std::size_t k = 0; k < n; ++k) data.push_back(sampler.draw(rng));
  return data;
}

void GibbsConfig::validate() const {
  if (burn_in < 0) throw std::invalid_argument("GibbsConfig: burn_in must be >= 0");
  if (thinning < 1) throw std::invalid_argument("GibbsConfig: thinning must be >= 1");
}

namespace {

double logistic(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

double gibbs_conditional(const SymMat& theta, State x, int i) {
  const int d = static_cast<int>(theta.dim());
  if (i < 0 || i >= d) {
    throw std::out_of_range("gibbs_conditional: coordinate " + std::to_string(i) + " out of range");
  }
  double field = theta(i, i);
  for (State r = x & ~(State{1} << i); r; r &= r - 1) {
    const int j = __builtin_ctzll(r);
    if (j < d) field += 2.0 * theta(i, j);
  }
  return logistic(field);
}

double gibbs_conditional(const SymMat& theta, const BitVector& x, int i) {
  if (static_cast<Index>(x.size()) != theta.dim()) {
    throw std::invalid_argument("gibbs_conditional: bit-vector length does not match dim");
  }
  return gibbs_conditional(theta, pack(x), i);
}

BinaryDataset gibbs_sample(const SymMat& theta, std::size_t n, const GibbsConfig& config) {
  config.validate();
  if (n < 1) throw std::invalid_argument("gibbs_sample: n must be >= 1");
  const int d = static_cast<int>(theta.dim());
  if (d > kMaxPackedDim) throw std::invalid_argument("gibbs_sample: dim exceeds 64");
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  State x = 0;
  for (int i = 0; i < d; ++i)
    if (unif(rng) < 0.5) x |= State{1} << i;

  const auto sweep = [&] {
    for (int i = 0; i < d; ++i) {
      const double p = gibbs_conditional(theta, x, i);
      if (unif(rng) < p) {
        x |= State{1} << i;
      } else {
        x &= ~(State{1} << i);
      }
    }
  };

  for (int b = 0; b < config.burn_in; ++b) sweep();
  BinaryDataset data(d);
  data.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (int t = 0; t < config.thinning; ++t) sweep();
    data.push_back(x);
  }
  return data;
}

std::vector<double> state_frequencies(const BinaryDataset& data) {
  check_enumerable(data.dim());
  std::vector<double> freq(state_count(data.dim()), 0.0);
  if (data.empty()) return freq;
  for (State s : data.states()) freq[s] += 1.0;
  const double n = static_cast<double>(data.count());
  for (double& f : freq) f /= n;
  return freq;
}

double empirical_vs_exact_tv(const BinaryDataset& data, const SymMat& theta) {
  if (data.dim() != theta.dim()) {
    throw std::invalid_argument("empirical_vs_exact_tv: dimension mismatch");
  }
  const auto p = state_probabilities(theta);
  const auto freq = state_frequencies(data);
  double tv = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) tv += std::abs(freq[s] - p[s]);
  return 0.5 * tv;
}

}  // namespace slr
