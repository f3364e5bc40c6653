#include "slr/ising.hpp"
#include "slr/latent_cg.hpp"
#include "slr/sampler.hpp"

#include "doctest.h"
#include "oracles.hpp"

using namespace slr;

namespace {

LatentCGModel random_model(int d, int l, std::mt19937_64& rng, double r_scale = 0.7) {
  std::normal_distribution<double> n(0.0, r_scale);
  Eigen::MatrixXd r(l, d);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < d; ++j) r(i, j) = n(rng);
  const SymMat lambda = SymMat::identity(l) + 0.3 * oracle::random_psd(l, l, rng);
  return LatentCGModel(0.5 * oracle::random_symmetric(d, rng), r, lambda);
}

}  // namespace

TEST_CASE("marginal_interaction") {
  Eigen::MatrixXd r(1, 2);
  r << 1, 1;
  SymMat lam(1);
  lam.set(0, 0, 2.0);
  const LatentCGModel m(SymMat(2), r, lam);
  CHECK(max_abs(SymMat(marginal_interaction(m) - SymMat::constant(2, 0.25))) < 1e-15);
  CHECK(max_abs(SymMat(marginal_theta(m) - SymMat::constant(2, 0.25))) < 1e-15);

  const LatentCGModel zero(SymMat(3), Eigen::MatrixXd::Zero(2, 3), SymMat::identity(2));
  CHECK(marginal_interaction(zero) == SymMat(3));
}

TEST_CASE("marginal_interaction is PSD with rank l") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const LatentCGModel m = random_model(4, 2, rng);
    const SymMat l = marginal_interaction(m);
    const Eigen::VectorXd ev = eigenvalues(l);
    CHECK(ev.minCoeff() >= -1e-12);
    int rank = 0;
    for (Index k = 0; k < ev.size(); ++k) rank += ev(k) > 1e-10 * ev.maxCoeff();
    CHECK(rank == 2);
    // against the explicit inverse
    const Eigen::MatrixXd direct = 0.5 * m.r().transpose() * m.lambda().matrix().inverse() * m.r();
    CHECK((l.matrix() - direct).norm() < 1e-12);
  }
}

TEST_CASE("marginal_interaction is invariant under orthogonal changes of the latent basis") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const LatentCGModel m = random_model(5, 3, rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(oracle::random_symmetric(3, rng).matrix())
                                  .householderQ();
    const LatentCGModel rotated(m.s(), q * m.r(), SymMat::symmetrize(q * m.lambda().matrix() * q.transpose()));
    CHECK((marginal_interaction(m).matrix() - marginal_interaction(rotated).matrix()).norm() < 1e-10);
  }
}

TEST_CASE("construction rejects invalid Lambda and shapes") {
  SymMat singular(2);
  singular.set(0, 0, 1.0);
  CHECK_THROWS_AS(LatentCGModel(SymMat(3), Eigen::MatrixXd::Zero(2, 3), singular), std::invalid_argument);
  SymMat ill = SymMat::identity(2);
  ill.set(1, 1, 1e-14);
  CHECK_THROWS_AS(LatentCGModel(SymMat(3), Eigen::MatrixXd::Zero(2, 3), ill), std::invalid_argument);
  CHECK_THROWS_AS(LatentCGModel(SymMat(3), Eigen::MatrixXd::Zero(2, 4), SymMat::identity(2)), std::invalid_argument);
  CHECK_THROWS_AS(LatentCGModel(SymMat(3), Eigen::MatrixXd::Zero(1, 3), SymMat::identity(2)), std::invalid_argument);
}

TEST_CASE("conditional_gaussian_params") {
  std::mt19937_64 rng(3);
  const LatentCGModel m = random_model(3, 2, rng);
  const auto at_zero = conditional_gaussian_params(m, BitVector{0, 0, 0});
  CHECK(at_zero.mean.norm() == 0.0);
  CHECK((at_zero.covariance.matrix() - m.lambda().matrix().inverse()).norm() < 1e-10);

  Eigen::MatrixXd r(1, 2);
  r << 1, 0;
  const LatentCGModel simple(SymMat(2), r, SymMat::identity(1));
  const auto c = conditional_gaussian_params(simple, BitVector{1, 0});
  CHECK(c.mean(0) == doctest::Approx(1.0));
  CHECK(c.covariance(0, 0) == doctest::Approx(1.0));

  for (const auto& x : oracle::all_states(3)) {
    const auto p = conditional_gaussian_params(m, x);
    Eigen::VectorXd xv(3);
    for (int i = 0; i < 3; ++i) xv(i) = x[std::size_t(i)];
    const Eigen::VectorXd expect = m.lambda().matrix().fullPivLu().solve(m.r() * xv);
    CHECK((p.mean - expect).norm() < 1e-10);
    CHECK((p.covariance.matrix() - at_zero.covariance.matrix()).norm() == 0.0);
  }
  CHECK_THROWS(conditional_gaussian_params(m, BitVector{0, 1}));
}

TEST_CASE("sample_full: R = 0 reduces to Ising(S)") {
  std::mt19937_64 rng(4);
  const SymMat s = oracle::random_symmetric(3, rng, 0.5);
  const LatentCGModel m(s, Eigen::MatrixXd::Zero(1, 3), SymMat::identity(1));
  const auto samples = sample_full(m, 50000, 5);
  BinaryDataset xs(3);
  for (const auto& fs : samples) xs.push_back(fs.x);
  CHECK(empirical_vs_exact_tv(xs, s) < 0.05);
  CHECK(sample_full(m, 0, 5).empty());
}

TEST_CASE("sample_full: mean of y given x") {
  Eigen::MatrixXd r(1, 2);
  r << 0.8, -0.5;
  SymMat lam(1);
  lam.set(0, 0, 1.5);
  const LatentCGModel m(SymMat(2), r, lam);
  const auto samples = sample_full(m, 20000, 6);
  for (const auto& x : oracle::all_states(2)) {
    double sum = 0.0, sq = 0.0;
    int count = 0;
    for (const auto& fs : samples) {
      if (fs.x != x) continue;
      sum += fs.y(0);
      sq += fs.y(0) * fs.y(0);
      ++count;
    }
    REQUIRE(count > 100);
    const double mean = sum / count;
    const double se = std::sqrt((sq / count - mean * mean) / count);
    const double expect = (0.8 * x[0] - 0.5 * x[1]) / 1.5;
    CHECK(std::abs(mean - expect) < 3 * se);
  }
}

TEST_CASE("sample_full marginal matches the Ising marginal") {
  std::mt19937_64 rng(7);
  const LatentCGModel m = random_model(4, 2, rng);
  const auto samples = sample_full(m, 100000, 8);
  BinaryDataset xs(4);
  for (const auto& fs : samples) xs.push_back(fs.x);
  const SymMat theta = m.s() + SymMat(0.5 * SymMat::symmetrize(m.r().transpose() * m.lambda().matrix().inverse() * m.r()));
  CHECK(empirical_vs_exact_tv(xs, theta) < 0.03);
}

TEST_CASE("sample_full is deterministic") {
  std::mt19937_64 rng(9);
  const LatentCGModel m = random_model(3, 2, rng);
  const auto a = sample_full(m, 300, 4);
  const auto b = sample_full(m, 300, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].x == b[k].x);
    CHECK(a[k].y == b[k].y);
  }
}
