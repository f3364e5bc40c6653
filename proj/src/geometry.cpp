#include "slr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace slr {

// ---------------------------------------------------------------------------
// Tangent-space descriptors

SupportSet::SupportSet(Index dim) : mask_(decltype(mask_)::Constant(dim, dim, false)) {
  if (dim < 1) throw std::invalid_argument("SupportSet: dim must be >= 1");
}

SupportSet SupportSet::full(Index dim) {
  SupportSet s(dim);
  s.mask_.setConstant(true);
  return s;
}

SupportSet SupportSet::diagonal(Index dim) {
  SupportSet s(dim);
  for (Index i = 0; i < dim; ++i) s.mask_(i, i) = true;
  return s;
}

void SupportSet::insert(Index i, Index j) {
  if (i < 0 || j < 0 || i >= dim() || j >= dim()) throw std::out_of_range("SupportSet: index out of range");
  mask_(i, j) = true;
  mask_(j, i) = true;
}

std::vector<std::pair<Index, Index>> SupportSet::free_positions() const {
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < dim(); ++i)
    for (Index j = i; j < dim(); ++j)
      if (mask_(i, j)) out.emplace_back(i, j);
  return out;
}

int SupportSet::max_degree() const {
  int best = 0;
  for (Index i = 0; i < dim(); ++i) best = std::max(best, static_cast<int>(mask_.row(i).count()));
  return best;
}

LowRankBasis::LowRankBasis(Index dim) : u_(dim, 0) {
  if (dim < 1) throw std::invalid_argument("LowRankBasis: dim must be >= 1");
}

LowRankBasis::LowRankBasis(Eigen::MatrixXd u) : u_(std::move(u)) {
  if (u_.rows() < 1) throw std::invalid_argument("LowRankBasis: dim must be >= 1");
  if (u_.cols() > u_.rows()) throw std::invalid_argument("LowRankBasis: rank exceeds dim");
  const Eigen::MatrixXd gram = u_.transpose() * u_;
  if ((gram - Eigen::MatrixXd::Identity(u_.cols(), u_.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("LowRankBasis: columns are not orthonormal");
  }
}

SupportSet sparse_tangent(const SymMat& s, double tol) {
  if (tol < 0) throw std::invalid_argument("sparse_tangent: negative tolerance");
  SupportSet omega(s.dim());
  for (Index j = 0; j < s.dim(); ++j)
    for (Index i = j; i < s.dim(); ++i)
      if (std::abs(s(i, j)) > tol) omega.insert(i, j);
  return omega;
}

LowRankBasis lowrank_tangent(const SymMat& l, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l.matrix());
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (top == 0.0) return LowRankBasis(l.dim());
  std::vector<Index> keep;
  // Descending |eigenvalue| order.
  std::vector<Index> order(static_cast<std::size_t>(ev.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(ev(a)) > std::abs(ev(b)); });
  for (Index k : order)
    if (std::abs(ev(k)) > rank_tol * top) keep.push_back(k);
  Eigen::MatrixXd u(l.dim(), static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) u.col(static_cast<Index>(c)) = es.eigenvectors().col(keep[c]);
  return LowRankBasis(std::move(u));
}

SymMat project_omega(const SupportSet& omega, const SymMat& m) {
  if (omega.dim() != m.dim()) throw std::invalid_argument("project_omega: dimension mismatch");
  SymMat out(m.dim());
  for (const auto& [i, j] : omega.free_positions()) out.set(i, j, m(i, j));
  return out;
}

SymMat project_omega_perp(const SupportSet& omega, const SymMat& m) {
  if (omega.dim() != m.dim()) throw std::invalid_argument("project_omega_perp: dimension mismatch");
  SymMat out = m;
  for (const auto& [i, j] : omega.free_positions()) out.set(i, j, 0.0);
  return out;
}

SymMat project_t(const LowRankBasis& basis, const SymMat& n) {
  if (basis.dim() != n.dim()) throw std::invalid_argument("project_t: dimension mismatch");
  if (basis.rank() == 0) return SymMat(n.dim());
  const Eigen::MatrixXd p = basis.projector();
  const Eigen::MatrixXd pn = p * n.matrix();
  return SymMat::symmetrize(pn + pn.transpose() - pn * p);
}

SymMat project_t_perp(const LowRankBasis& basis, const SymMat& n) {
  if (basis.dim() != n.dim()) throw std::invalid_argument("project_t_perp: dimension mismatch");
  if (basis.rank() == 0) return n;
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n.dim(), n.dim()) - basis.projector();
  return SymMat::symmetrize(q * n.matrix() * q);
}

double coherence(const LowRankBasis& basis) {
  if (basis.rank() == 0) return 0.0;
  return basis.u().rowwise().norm().maxCoeff();
}

double twisting(const LowRankBasis& b1, const LowRankBasis& b2, int restarts, std::uint64_t seed) {
  if (b1.dim() != b2.dim()) throw std::invalid_argument("twisting: dimension mismatch");
  const LinearMap diff = [&](const SymMat& m) { return project_t(b1, m) - project_t(b2, m); };
  SpectralNormSearch search;
  search.restarts = restarts;
  search.seed = seed;
  return spectral_norm_lower_bound(diff, diff, b1.dim(), search).value;
}

// ---------------------------------------------------------------------------
// Norm compatibility constants

MuOmega mu_omega(const SupportSet& omega, int max_free_positions, int random_patterns, std::uint64_t seed) {
  MuOmega out;
  out.upper = omega.max_degree();
  const auto free = omega.free_positions();
  const Index d = omega.dim();
  if (free.empty()) {
    out.exact = 0.0;
    return out;
  }
  const auto norm_of = [](const Eigen::MatrixXd& n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(n, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  };
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [i, j] : free) n(i, j) = n(j, i) = 1.0;
  double best = norm_of(n);

  const int f = static_cast<int>(free.size());
  if (f <= max_free_positions) {
    // N and −N have the same norm, so the first sign stays +1. Walk the
    // remaining f − 1 signs in Gray-code order, one flip per pattern.
    const std::uint64_t patterns = std::uint64_t{1} << (f - 1);
    for (std::uint64_t g = 1; g < patterns; ++g) {
      const int k = __builtin_ctzll(g) + 1;
      const auto [i, j] = free[static_cast<std::size_t>(k)];
      n(i, j) = -n(i, j);
      n(j, i) = n(i, j);
      best = std::max(best, norm_of(n));
    }
    out.exact = best;
    out.lower = best;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < random_patterns; ++t) {
    for (const auto& [i, j] : free) n(i, j) = n(j, i) = coin(rng) ? 1.0 : -1.0;
    best = std::max(best, norm_of(n));
  }
  out.lower = best;
  return out;
}

namespace {

struct NormWithSub {
  double value;
  SymMat sub;  // a Frobenius subgradient on Sym(d)
};

using NormFn = std::function<NormWithSub(const SymMat&)>;

NormWithSub inf_norm_sub(const SymMat& w) {
  Index bi = 0;
  Index bj = 0;
  double best = -1.0;
  for (Index j = 0; j < w.dim(); ++j)
    for (Index i = j; i < w.dim(); ++i)
      if (std::abs(w(i, j)) > best) {
        best = std::abs(w(i, j));
        bi = i;
        bj = j;
      }
  SymMat sub(w.dim());
  const double s = w(bi, bj) < 0 ? -1.0 : 1.0;
  sub.set(bi, bj, bi == bj ? s : 0.5 * s);
  return {best, std::move(sub)};
}

NormWithSub spec_norm_sub(const SymMat& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.matrix());
  const Index last = w.dim() - 1;
  const Index k = std::abs(es.eigenvalues()(0)) > std::abs(es.eigenvalues()(last)) ? 0 : last;
  const double lam = es.eigenvalues()(k);
  const Eigen::VectorXd v = es.eigenvectors().col(k);
  return {std::abs(lam), SymMat::symmetrize((lam < 0 ? -1.0 : 1.0) * v * v.transpose())};
}

// ‖A M‖ with subgradient A*(∂‖·‖(AM)).
NormFn composed(NormFn norm, LinearMap apply, LinearMap adjoint) {
  return [norm = std::move(norm), apply = std::move(apply), adjoint = std::move(adjoint)](const SymMat& m) {
    auto inner_sub = norm(apply(m));
    return NormWithSub{inner_sub.value, adjoint(inner_sub.sub)};
  };
}

struct RatioSearch {
  NormFn numerator;
  NormFn denominator;
  LinearMap project;  // onto the feasible subspace
  bool maximize = true;
  int restarts = 8;
  int max_iterations = 150;
};

double ratio_value(const RatioSearch& rs, const SymMat& w) {
  const double den = rs.denominator(w).value;
  if (!(den > 0)) return std::numeric_limits<double>::quiet_NaN();
  return rs.numerator(w).value / den;
}

bool better(const RatioSearch& rs, double a, double b) { return rs.maximize ? a > b : a < b; }

// Local search on numerator/denominator over a subspace: projected
// subgradient steps with an adaptive step, accepting only improvements.
// `candidates` are screened by value and the best `restarts` refined.
double ratio_search(const RatioSearch& rs, const std::vector<SymMat>& candidates) {
  std::vector<std::pair<double, SymMat>> scored;
  for (const SymMat& c : candidates) {
    SymMat w = rs.project(c);
    const double fn = frobenius_norm(w);
    if (!(fn > 1e-12)) continue;
    w *= 1.0 / fn;
    const double r = ratio_value(rs, w);
    if (std::isfinite(r)) scored.emplace_back(r, std::move(w));
  }
  if (scored.empty()) return 0.0;
  std::stable_sort(scored.begin(), scored.end(),
                   [&](const auto& a, const auto& b) { return better(rs, a.first, b.first); });
  if (static_cast<int>(scored.size()) > rs.restarts) scored.resize(static_cast<std::size_t>(rs.restarts));

  double best = scored.front().first;
  for (auto& [r, w] : scored) {
    double step = 0.25;
    for (int it = 0; it < rs.max_iterations && step > 1e-7; ++it) {
      const auto num = rs.numerator(w);
      const auto den = rs.denominator(w);
      const SymMat raw = (1.0 / den.value) * num.sub - (num.value / (den.value * den.value)) * den.sub;
      SymMat grad = rs.project(raw);
      const double gn = frobenius_norm(grad);
      // A projected gradient at roundoff level is noise, not a direction.
      if (!(gn > 1e-10 * std::max(1.0, frobenius_norm(raw)))) break;
      const double dir = rs.maximize ? 1.0 : -1.0;
      SymMat trial = rs.project(w + (dir * step / gn) * grad);
      const double fn = frobenius_norm(trial);
      if (!(fn > 1e-12)) {
        step *= 0.5;
        continue;
      }
      trial *= 1.0 / fn;
      const double rt = ratio_value(rs, trial);
      if (std::isfinite(rt) && better(rs, rt, r)) {
        w = std::move(trial);
        r = rt;
        step = std::min(1.0, step * 1.5);
      } else {
        step *= 0.5;
      }
    }
    if (better(rs, r, best)) best = r;
  }
  return best;
}

std::vector<SymMat> unit_candidates(Index dim) {
  std::vector<SymMat> out;
  for (Index i = 0; i < dim; ++i)
    for (Index j = i; j < dim; ++j) out.push_back(SymMat::unit(dim, i, j));
  return out;
}

void add_random_candidates(std::vector<SymMat>& out, Index dim, int count, std::uint64_t seed, std::uint64_t stream) {
  auto rng = derived_rng(seed, stream);
  for (int k = 0; k < count; ++k) out.push_back(random_symmetric(dim, rng));
}

}  // namespace

XiBracket xi_t(const LowRankBasis& basis, int restarts, std::uint64_t seed) {
  if (basis.rank() == 0) return {0.0, 0.0};
  XiBracket out;
  out.upper = std::min(1.0, 2.0 * coherence(basis));
  RatioSearch rs;
  rs.numerator = inf_norm_sub;
  rs.denominator = spec_norm_sub;
  rs.project = [&basis](const SymMat& m) { return project_t(basis, m); };
  rs.maximize = true;
  rs.restarts = restarts;
  auto candidates = unit_candidates(basis.dim());
  add_random_candidates(candidates, basis.dim(), restarts, seed, 0);
  out.lower = ratio_search(rs, candidates);
  return out;
}

// ---------------------------------------------------------------------------
// Stability constants

namespace {

// Ω-restricted Hessian blocks in the coordinates m_p of M = Σ_p m_p B_p,
// B_p = e_i e_jᵀ + e_j e_iᵀ (or e_i e_iᵀ). With ‖M‖∞ = max_p |m_p|:
//   min ‖P_Ω H M‖∞ = 1 / ‖A⁻¹‖_{∞→∞},   max ‖P_{Ω⊥} H M‖∞ = ‖C‖_{∞→∞}.
struct OmegaExact {
  double alpha;
  double delta;
};

OmegaExact omega_exact(const LinearMap& hessian, const SupportSet& omega) {
  const Index d = omega.dim();
  const auto free = omega.free_positions();
  const Index f = static_cast<Index>(free.size());
  std::vector<std::pair<Index, Index>> perp;
  for (Index i = 0; i < d; ++i)
    for (Index j = i; j < d; ++j)
      if (!omega.contains(i, j)) perp.emplace_back(i, j);
  Eigen::MatrixXd a(f, f);
  Eigen::MatrixXd c(static_cast<Index>(perp.size()), f);
  for (Index p = 0; p < f; ++p) {
    const SymMat hb = hessian(SymMat::unit(d, free[p].first, free[p].second));
    for (Index q = 0; q < f; ++q) a(q, p) = hb(free[q].first, free[q].second);
    for (Index q = 0; q < c.rows(); ++q) c(q, p) = hb(perp[q].first, perp[q].second);
  }
  OmegaExact out{0.0, 0.0};
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.isInvertible()) {
    out.alpha = 1.0 / lu.inverse().cwiseAbs().rowwise().sum().maxCoeff();
  }
  if (c.rows() > 0) out.delta = c.cwiseAbs().rowwise().sum().maxCoeff();
  return out;
}

// Tangent spaces T' = T(U' D U'ᵀ) near T = T(U D Uᵀ), obtained by rotating U
// toward its complement with twist bound 2‖Δ‖/σ_min ≤ ε and ‖Δ‖ ≤ σ_min/8.
std::vector<LowRankBasis> nearby_tangent_spaces(const Eigen::MatrixXd& u, const Eigen::VectorXd& eig,
                                                double epsilon, int count, std::uint64_t seed) {
  std::vector<LowRankBasis> out{LowRankBasis(u)};
  if (epsilon <= 0 || u.cols() == 0 || u.cols() == u.rows()) return out;
  const Index d = u.rows();
  const Index r = u.cols();
  const double sigma = eig.cwiseAbs().minCoeff();
  const Eigen::MatrixXd base = u * eig.asDiagonal() * u.transpose();
  const Eigen::MatrixXd comp = Eigen::MatrixXd::Identity(d, d) - u * u.transpose();
  const double limit = std::min(epsilon * sigma / 2.0, sigma / 8.0);
  auto rng = derived_rng(seed, 101);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.25, 1.0);
  for (int k = 0; k < count; ++k) {
    Eigen::MatrixXd y(d, r);
    for (Index i = 0; i < y.size(); ++i) y.data()[i] = normal(rng);
    const Eigen::MatrixXd dir = comp * y;
    double tau = unif(rng);
    for (int halvings = 0; halvings < 80; ++halvings, tau *= 0.5) {
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(u + tau * dir);
      Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
      // Align column signs with U so that U' D U'ᵀ is close to the base point.
      for (Index c = 0; c < r; ++c)
        if (q.col(c).dot(u.col(c)) < 0) q.col(c) *= -1.0;
      const Eigen::MatrixXd moved = q * eig.asDiagonal() * q.transpose();
      const Eigen::MatrixXd delta = moved - base;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (delta + delta.transpose()), Eigen::EigenvaluesOnly);
      if (es.eigenvalues().cwiseAbs().maxCoeff() <= limit) {
        out.emplace_back(q);
        break;
      }
    }
  }
  return out;
}

}  // namespace

StabilityEstimates stability_estimates(const LinearMap& hessian, const TangentPair& pair, double epsilon,
                                       int sample_count, int restarts, std::uint64_t seed,
                                       const std::optional<SymMat>& base) {
  if (epsilon < 0) throw std::invalid_argument("stability_estimates: epsilon must be >= 0");
  if (epsilon > 0 && sample_count <= 0) {
    throw std::invalid_argument("stability_estimates: sample_count must be positive when epsilon > 0");
  }
  if (pair.omega.dim() != pair.t_basis.dim()) throw std::invalid_argument("stability_estimates: dimension mismatch");
  const Index d = pair.omega.dim();
  StabilityEstimates est;
  est.epsilon = epsilon;
  est.sample_count = sample_count;

  est.has_omega = !pair.omega.empty();
  est.has_t = pair.t_basis.rank() > 0;
  if (est.has_omega) {
    const auto ex = omega_exact(hessian, pair.omega);
    est.alpha_omega = ex.alpha;
    est.delta_omega = ex.delta;
    RatioSearch rs;
    rs.numerator = composed(spec_norm_sub, hessian, hessian);
    rs.denominator = spec_norm_sub;
    rs.project = [&pair](const SymMat& m) { return project_omega(pair.omega, m); };
    rs.restarts = restarts;
    auto candidates = unit_candidates(d);
    add_random_candidates(candidates, d, restarts, seed, 1);
    est.beta_omega = ratio_search(rs, candidates);
  }

  if (pair.t_basis.rank() > 0) {
    Eigen::VectorXd eig = Eigen::VectorXd::Ones(pair.t_basis.rank());
    if (base) {
      if (base->dim() != d) throw std::invalid_argument("stability_estimates: base dimension mismatch");
      eig = (pair.t_basis.u().transpose() * base->matrix() * pair.t_basis.u()).diagonal();
    }
    const auto spaces = nearby_tangent_spaces(pair.t_basis.u(), eig, epsilon, sample_count, seed);
    double alpha_t = std::numeric_limits<double>::infinity();
    double delta_t = 0.0;
    double beta_t = 0.0;
    std::uint64_t stream = 10;
    for (const LowRankBasis& tp : spaces) {
      const LinearMap proj = [&tp](const SymMat& m) { return project_t(tp, m); };
      const LinearMap perp = [&tp](const SymMat& m) { return project_t_perp(tp, m); };
      auto candidates = unit_candidates(d);
      add_random_candidates(candidates, d, restarts, seed, stream++);

      RatioSearch gain;
      gain.numerator = composed(spec_norm_sub, [&](const SymMat& m) { return proj(hessian(m)); },
                                [&](const SymMat& m) { return hessian(proj(m)); });
      gain.denominator = spec_norm_sub;
      gain.project = proj;
      gain.maximize = false;
      gain.restarts = restarts;
      alpha_t = std::min(alpha_t, ratio_search(gain, candidates));

      RatioSearch effect = gain;
      effect.numerator = composed(spec_norm_sub, [&](const SymMat& m) { return perp(hessian(m)); },
                                  [&](const SymMat& m) { return hessian(perp(m)); });
      effect.maximize = true;
      delta_t = std::max(delta_t, ratio_search(effect, candidates));

      RatioSearch beta = gain;
      beta.numerator = composed(inf_norm_sub, hessian, hessian);
      beta.denominator = inf_norm_sub;
      beta.maximize = true;
      beta_t = std::max(beta_t, ratio_search(beta, candidates));
    }
    est.alpha_t = alpha_t;
    est.delta_t = delta_t;
    est.beta_t = beta_t;
    est.sample_count = static_cast<int>(spaces.size()) - 1;
  }

  est.method_note =
      "alpha_omega and delta_omega exact via inf-norm operator blocks on Omega; beta_omega by projected "
      "subgradient search; T-indexed constants minimized/maximized over T and " +
      std::to_string(est.sample_count) +
      " sampled tangent spaces within the twist bound (min estimates are upper bounds, max estimates lower "
      "bounds)";
  if (pair.omega.empty()) est.method_note += "; Omega empty: Omega constants not constraining";
  if (pair.t_basis.rank() == 0) est.method_note += "; T empty: T constants not constraining";
  return est;
}

// ---------------------------------------------------------------------------
// Assumption checks

GammaRange gamma_range(double alpha, double beta, double nu, double xi, double mu) {
  if (!(alpha > 0)) throw std::invalid_argument("gamma_range: alpha must be > 0");
  if (!(beta > 0)) throw std::invalid_argument("gamma_range: beta must be > 0");
  if (!(mu > 0)) throw std::invalid_argument("gamma_range: mu must be > 0");
  if (!(nu > 0 && nu <= 0.5)) throw std::invalid_argument("gamma_range: nu must be in (0, 1/2]");
  if (!(xi >= 0)) throw std::invalid_argument("gamma_range: xi must be >= 0");
  GammaRange g;
  g.gamma_min = 3.0 * beta * (2.0 - nu) * xi / (nu * alpha);
  g.gamma_max = nu * alpha / (2.0 * beta * (2.0 - nu) * mu);
  g.feasible = g.gamma_min <= g.gamma_max;
  g.product = mu * xi;
  const double r = nu * alpha / (beta * (2.0 - nu));
  g.product_bound = r * r / 6.0;
  return g;
}

GapCheck gap_check(const SymMat& s_star, const SymMat& l_star, double lambda_n, double mu, double xi, double c_s,
                   double c_l, double zero_tol) {
  if (!(lambda_n > 0 && mu > 0 && xi >= 0 && c_s > 0 && c_l > 0)) {
    throw std::invalid_argument("gap_check: lambda_n, mu, c_s, c_l must be > 0 and xi >= 0");
  }
  s_star.check_same_dim(l_star);
  GapCheck g;
  g.s_threshold = c_s * lambda_n / mu;
  g.sigma_threshold = xi > 0 ? c_l * lambda_n / (xi * xi) : std::numeric_limits<double>::infinity();

  double s_min = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < s_star.dim(); ++i)
    for (Index j = 0; j < s_star.dim(); ++j)
      if (std::abs(s_star(i, j)) > zero_tol) s_min = std::min(s_min, std::abs(s_star(i, j)));
  g.s_vacuous = !std::isfinite(s_min);
  g.s_min = g.s_vacuous ? 0.0 : s_min;
  g.s_ok = g.s_vacuous || g.s_min >= g.s_threshold;

  const Eigen::VectorXd ev = eigenvalues(l_star).cwiseAbs();
  const double cut = zero_tol * std::max(1.0, ev.maxCoeff());
  double sigma_min = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < ev.size(); ++k)
    if (ev(k) > cut) sigma_min = std::min(sigma_min, ev(k));
  g.sigma_vacuous = !std::isfinite(sigma_min);
  g.sigma_min = g.sigma_vacuous ? 0.0 : sigma_min;
  g.sigma_ok = g.sigma_vacuous || g.sigma_min >= g.sigma_threshold;
  return g;
}

double gamma_norm(const SymMat& s, const SymMat& l, double gamma) {
  if (!(gamma > 0)) throw std::invalid_argument("gamma_norm: gamma must be > 0");
  return std::max(max_abs(s) / gamma, spectral_norm(l));
}

double twisted_xi_bound(double xi_t1, double rho) {
  if (!(rho >= 0 && rho < 1)) throw std::invalid_argument("twisted_xi_bound: rho must be in [0, 1)");
  return (xi_t1 + rho) / (1.0 - rho);
}

PerturbationCheck perturbation_bounds_check(const SymMat& l, const SymMat& delta, double rank_tol, int restarts,
                                            std::uint64_t seed) {
  l.check_same_dim(delta);
  PerturbationCheck out;
  const LowRankBasis base = lowrank_tangent(l, rank_tol);
  if (base.rank() == 0) return out;
  const Eigen::VectorXd ev = eigenvalues(l).cwiseAbs();
  const double cut = rank_tol * ev.maxCoeff();
  double sigma = std::numeric_limits<double>::infinity();
  for (Index k = 0; k < ev.size(); ++k)
    if (ev(k) > cut) sigma = std::min(sigma, ev(k));
  out.sigma = sigma;
  out.delta_norm = spectral_norm(delta);
  const SymMat moved = l + delta;
  const LowRankBasis moved_basis = lowrank_tangent(moved, rank_tol);
  if (out.delta_norm > sigma / 8.0 * (1.0 + 1e-12) || moved_basis.rank() != base.rank()) return out;
  out.applicable = true;
  constexpr double kSlack = 1e-12;
  out.twist_estimate = twisting(moved_basis, base, restarts, seed);
  out.twist_bound = 2.0 * out.delta_norm / sigma;
  out.twist_bound_ok = out.twist_estimate <= out.twist_bound + kSlack;
  out.normal_component = spectral_norm(project_t_perp(base, delta));
  out.normal_bound = out.delta_norm * out.delta_norm / sigma;
  out.normal_bound_ok = out.normal_component <= out.normal_bound + kSlack;
  return out;
}

}  // namespace slr
