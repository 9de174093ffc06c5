#include <stream_kpca/baselines.hpp>
#include <stream_kpca/data.hpp>
#include <stream_kpca/error.hpp>
#include <stream_kpca/eval.hpp>
#include <stream_kpca/kernels.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_helpers.hpp"

namespace sk = stream_kpca;
using sk::FeatureMap;
using sk::Matrix;
using sk::Vector;
using sk::testing::random_normal;

TEST(Rnca, SinglePointCovariance) {
  const FeatureMap fm = FeatureMap::sample(sk::gaussian_kernel(), 12, 3, 1);
  const Matrix A = random_normal(1, 3, 2);
  const auto model = sk::rnca_train(fm, A);
  const Vector z = fm.apply(A.row(0).transpose());
  ASSERT_TRUE(model.covariance().has_value());
  EXPECT_LE((*model.covariance() - z * z.transpose()).norm(), 1e-14);
  EXPECT_NEAR(model.eigenvalues()(0), z.squaredNorm(), 1e-12);
  EXPECT_LE(model.eigenvalues()(1), 1e-12);
}

TEST(Rnca, CovarianceMatchesBatchProduct) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FeatureMap fm = FeatureMap::sample(sk::gaussian_kernel(0.8), 40, 4, seed);
    const Matrix A = random_normal(150, 4, 10 + seed);
    const auto model = sk::rnca_train(fm, A);
    const Matrix Z = fm.apply_batch(A);
    const Matrix& cov = *model.covariance();
    EXPECT_LE((cov - Z.transpose() * Z).norm(), 1e-10 * Z.squaredNorm());
    EXPECT_TRUE(sk::is_symmetric(cov, 0.0));
    EXPECT_LE(cov.trace(), 2.0 * 150);
    EXPECT_GE(model.eigenvalues().minCoeff(), -1e-10 * Z.squaredNorm());
    EXPECT_EQ(model.n_seen(), 150u);
  }
}

TEST(Rnca, FullReconstructionEqualsZZt) {
  const FeatureMap fm = FeatureMap::sample(sk::gaussian_kernel(), 30, 3, 3);
  const Matrix A = random_normal(25, 3, 4);
  const auto model = sk::rnca_train(fm, A);
  const Matrix Z = fm.apply_batch(A);
  EXPECT_LE((model.reconstruct(A, 30) - Z * Z.transpose()).norm(), 1e-8 * Z.squaredNorm());
}

TEST(Rnca, RankKReconstruction) {
  const FeatureMap fm = FeatureMap::sample(sk::gaussian_kernel(), 30, 3, 5);
  const Matrix A = random_normal(25, 3, 6);
  const auto model = sk::rnca_train(fm, A);
  const Matrix G3 = model.reconstruct(A, 3);
  const Vector ev = sk::sym_eigenvalues(G3);
  EXPECT_LE(ev(3), 1e-10 * ev(0));
  EXPECT_THROW(model.reconstruct(A, 31), sk::ContractViolation);
  EXPECT_THROW(model.reconstruct(A, 0), sk::ContractViolation);
  const auto p = model.project(A.row(0).transpose(), 3);
  EXPECT_EQ(p.loading.size(), 3);
  EXPECT_NEAR(p.lifted.squaredNorm(), p.loading.squaredNorm() + p.residual * p.residual, 1e-12);
}

TEST(Rnca, GramSpectralBoundAtFullRank) {
  // n = 200, m = 1000, k = m: ||G - ZZ^T||_2 / n <= 0.25 on most seeds.
  const auto spec = sk::gaussian_kernel();
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Matrix A = random_normal(200, 4, 40 + seed) * 0.7;
    const auto model = sk::rnca_train(FeatureMap::sample(spec, 1000, 4, seed), A);
    const Matrix Y = model.factor(A, model.stored_rank());
    if (sk::spectral_error(sk::gram(spec, A), Y * Y.transpose()) <= 0.25) ++passes;
  }
  EXPECT_GE(passes, 2);
}

TEST(Rnca, EmptyAndDrift) {
  const FeatureMap fm = FeatureMap::sample(sk::gaussian_kernel(), 8, 3, 7);
  EXPECT_THROW(sk::rnca_train(fm, Matrix(0, 3)), sk::ContractViolation);
  sk::RncaTrainer trainer(fm);
  trainer.push(Vector::Zero(3));
  EXPECT_THROW(trainer.push(Vector::Zero(2)), sk::ContractViolation);
}

TEST(Rnca, SpaceWithinFormula) {
  sk::EntryCounter counter;
  const std::size_t m = 64;
  const std::size_t d = 5;
  const FeatureMap fm = FeatureMap::sample(sk::gaussian_kernel(), m, d, 8);
  { const auto model = sk::rnca_train(fm, random_normal(100, d, 9), &counter); }
  EXPECT_GE(counter.peak(), m * m);
  EXPECT_LE(counter.peak(), 3 * (m * m + m * d));
}

TEST(Nystrom, SingleSample) {
  const Matrix A = random_normal(1, 3, 10);
  const auto model = sk::nystrom_train(sk::gaussian_kernel(), 1, 1, 11, A);
  EXPECT_EQ(model.samples(), A);
  EXPECT_EQ(model.landmark_gram(), Matrix::Ones(1, 1));
  EXPECT_EQ(model.replacements(), std::vector<std::size_t>{1});
}

TEST(Nystrom, SlotMarginalsAreUniform) {
  // n = 10, c = 1, 20000 seeded runs: every point lands with frequency 0.1 +- 0.01.
  Matrix A(10, 1);
  for (Eigen::Index i = 0; i < 10; ++i) A(i, 0) = static_cast<double>(i);
  std::vector<int> counts(10, 0);
  const int runs = 20000;
  for (int r = 0; r < runs; ++r) {
    sk::NystromTrainer trainer(sk::gaussian_kernel(), 1, 1, static_cast<std::uint64_t>(r));
    for (Eigen::Index i = 0; i < 10; ++i) trainer.push(A.row(i).transpose());
    ++counts[static_cast<std::size_t>(trainer.finish().samples()(0, 0))];
  }
  for (int c : counts) EXPECT_NEAR(c / double(runs), 0.1, 0.01);
}

TEST(Nystrom, SlotsAreIndependent) {
  // Two slots over three points: all nine ordered pairs appear near 1/9.
  Matrix A(3, 1);
  A << 0, 1, 2;
  std::vector<int> counts(9, 0);
  const int runs = 9000;
  for (int r = 0; r < runs; ++r) {
    const auto model = sk::nystrom_train(sk::gaussian_kernel(), 2, 2, 50000 + r, A);
    const auto a = static_cast<int>(model.samples()(0, 0));
    const auto b = static_cast<int>(model.samples()(1, 0));
    ++counts[3 * a + b];
  }
  for (int c : counts) EXPECT_NEAR(c / double(runs), 1.0 / 9, 0.02);
}

TEST(Nystrom, DuplicatesHandledByPinv) {
  Matrix A(2, 2);
  A << 0.5, 0.5, 0.5, 0.5;  // identical points make W all-ones
  const auto model = sk::NystromModel(sk::gaussian_kernel(), A, 2, 2);
  EXPECT_EQ(model.retained_rank(), 1u);
  const Matrix expected = sk::pinv(sk::best_rank_k(model.landmark_gram(), 2));
  EXPECT_LE((model.rank_k_pinv() - expected).norm(), 1e-12);
  EXPECT_TRUE(model.project(Vector::Zero(2)).loading.allFinite());
}

TEST(Nystrom, RankKPinvMatchesNumerics) {
  const Matrix S = random_normal(12, 3, 12);
  for (std::size_t k : {1u, 4u, 12u}) {
    const auto model = sk::NystromModel(sk::gaussian_kernel(), S, k, 12);
    const Matrix expected = sk::pinv(sk::best_rank_k(model.landmark_gram(), k));
    EXPECT_LE((model.rank_k_pinv() - expected).norm(), 1e-8 * expected.norm()) << "k=" << k;
  }
}

TEST(Nystrom, ProjectionOfSample) {
  const Matrix S = random_normal(8, 4, 13);
  const auto model = sk::NystromModel(sk::gaussian_kernel(), S, 3, 8);
  const auto p = model.project(S.row(5).transpose());
  EXPECT_EQ(p.c_row(5), 1.0);
  EXPECT_EQ(p.loading.size(), 3);
  EXPECT_EQ(p.c_row.size(), 8);
  EXPECT_GE(p.residual, 0.0);
  for (Eigen::Index j = 0; j < 8; ++j)
    EXPECT_NEAR(p.c_row(j), sk::eval_kernel(model.kernel(), S.row(5).transpose(), S.row(j).transpose()), 1e-15);
}

TEST(Nystrom, LoadingsReproduceReconstruction) {
  const Matrix train = random_normal(10, 3, 14);
  const auto model = sk::NystromModel(sk::gaussian_kernel(), train, 10, 10);
  const Matrix X = random_normal(4, 3, 15);
  const Matrix G = model.reconstruct(X);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      const auto pi = model.project(X.row(i).transpose());
      const auto pj = model.project(X.row(j).transpose());
      EXPECT_NEAR(pi.loading.dot(pj.loading), G(i, j), 1e-8);
    }
}

TEST(Nystrom, FullDistinctSamplingIsExact) {
  // c = n distinct samples, k = c: reconstruction reproduces G and each gram column.
  const Matrix A = random_normal(18, 4, 16);
  const auto spec = sk::gaussian_kernel();
  const auto model = sk::NystromModel(spec, A, 18, 18);
  const Matrix G = sk::gram(spec, A);
  const Matrix Gbar = model.reconstruct(A);
  EXPECT_LE((Gbar - G).cwiseAbs().maxCoeff(), 1e-6 * 18);
  EXPECT_LE(sk::spectral_norm(Gbar - G), 1e-6 * 18);
  EXPECT_TRUE(sk::is_symmetric(Gbar, 1e-10));
  const Matrix C = sk::cross_gram(spec, A, model.samples());
  const auto p = model.project(A.row(3).transpose());
  EXPECT_LE((C * model.rank_k_pinv() * p.c_row - G.col(3)).norm(), 1e-6);
  EXPECT_LE((model.factor(A) * model.factor(A).transpose() - Gbar).norm(), 1e-8);
}

TEST(Nystrom, ReconstructionRankAtMostK) {
  const Matrix A = random_normal(30, 3, 17);
  const auto model = sk::nystrom_train(sk::gaussian_kernel(), 12, 4, 18, A);
  const Vector ev = sk::sym_eigenvalues(model.reconstruct(A));
  EXPECT_LE(std::abs(ev(4)), 1e-9 * ev(0));
}

TEST(Nystrom, OrderInvariantGivenContents) {
  const Matrix S = random_normal(6, 3, 19);
  Matrix reversed = S.colwise().reverse();
  const auto a = sk::NystromModel(sk::gaussian_kernel(), S, 6, 6);
  const auto b = sk::NystromModel(sk::gaussian_kernel(), reversed, 6, 6);
  const Matrix X = random_normal(5, 3, 20);
  EXPECT_LE((a.reconstruct(X) - b.reconstruct(X)).norm(), 1e-9);
}

TEST(Nystrom, SpectralBoundAtDerivedC) {
  // n = 300, c = ceil(ln(2n/delta)/eps^2) = 140 at eps = 0.25.
  const std::size_t c = sk::nystrom_sample_count(0.25, 0.1, 300);
  EXPECT_EQ(c, 140u);
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    sk::MixtureSpec spec;
    spec.n = 300;
    spec.d = 10;
    spec.seed = seed;
    const Matrix A = sk::gen_gaussian_mixture(spec);
    const auto model = sk::nystrom_train(sk::gaussian_kernel(), c, c, seed, A);
    if (sk::spectral_error(sk::gram(model.kernel(), A), model.reconstruct(A)) <= 0.25) ++passes;
  }
  EXPECT_GE(passes, 4);
}

TEST(Nystrom, ConfigErrorsAndEmptyStream) {
  EXPECT_THROW(sk::NystromTrainer(sk::gaussian_kernel(), 0, 1, 0), sk::ConfigError);
  EXPECT_THROW(sk::NystromTrainer(sk::gaussian_kernel(), 3, 4, 0), sk::ConfigError);
  EXPECT_THROW(sk::NystromTrainer(sk::gaussian_kernel(), 3, 0, 0), sk::ConfigError);
  EXPECT_THROW(sk::nystrom_train(sk::gaussian_kernel(), 3, 3, 0, Matrix(0, 2)), sk::ContractViolation);
}

TEST(Nystrom, SpaceWithinFormula) {
  sk::EntryCounter counter;
  const std::size_t c = 50;
  const std::size_t d = 4;
  { const auto model = sk::nystrom_train(sk::gaussian_kernel(), c, c, 21, random_normal(200, d, 22), &counter); }
  EXPECT_GE(counter.peak(), c * c);
  EXPECT_LE(counter.peak(), 3 * (c * c + c * d));
  EXPECT_EQ(counter.current(), 0u);
}
