#include <stream_kpca/data.hpp>
#include <stream_kpca/error.hpp>
#include <stream_kpca/eval.hpp>
#include <stream_kpca/kernels.hpp>
#include <stream_kpca/skpca.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "test_helpers.hpp"

namespace sk = stream_kpca;
using sk::Matrix;
using sk::SkpcaConfig;
using sk::Vector;
using sk::testing::random_normal;

namespace {

SkpcaConfig config(std::size_t m, std::size_t ell, std::uint64_t seed, double sigma = 1.0) {
  SkpcaConfig c;
  c.m = m;
  c.ell = ell;
  c.kernel = sk::gaussian_kernel(sigma);
  c.seed = seed;
  return c;
}

}  // namespace

TEST(SkpcaSizing, DerivedCounts) {
  // (9 + 2) / 0.0625 * ln(2 * 2000 / 0.1) = 176 * 10.5966 = 1865.0...
  EXPECT_EQ(sk::rff_feature_count(0.25, 0.1, 2000), 1866u);
  // 176 * ln(6000) = 1531.1...
  EXPECT_EQ(sk::rff_feature_count(0.25, 0.1, 300), 1532u);
  // ln(40000) / 0.0625 = 169.5...
  EXPECT_EQ(sk::nystrom_sample_count(0.25, 0.1, 2000), 170u);
  EXPECT_EQ(sk::sketch_size_for(0.25), 16u);
  EXPECT_EQ(sk::sketch_size_for(0.3), 14u);  // ceil(13.33) = 14
  EXPECT_EQ(sk::sketch_size_for(0.8), 6u);   // ceil(5) = 5 -> 6
  EXPECT_EQ(sk::even_sketch_size(5), 6u);
  EXPECT_EQ(sk::even_sketch_size(10), 10u);
  EXPECT_THROW(sk::rff_feature_count(0.0, 0.1, 10), sk::ConfigError);
  EXPECT_THROW(sk::rff_feature_count(0.2, 1.0, 10), sk::ConfigError);
  EXPECT_THROW(sk::nystrom_sample_count(0.2, 0.1, 0), sk::ConfigError);
}

TEST(SkpcaConfig, FromErrorAndValidation) {
  const auto c = SkpcaConfig::from_error(0.25, 0.1, 2000, sk::gaussian_kernel(), 3);
  EXPECT_EQ(c.m, 1866u);
  EXPECT_EQ(c.ell, 16u);
  EXPECT_EQ(c.eps, 0.25);
  EXPECT_THROW(config(10, 3, 0).validate(), sk::ConfigError);
  EXPECT_THROW(config(4, 6, 0).validate(), sk::ConfigError);
  EXPECT_THROW(config(10, 0, 0).validate(), sk::ConfigError);
  auto bad = config(10, 4, 0);
  bad.eps = 1.5;
  EXPECT_THROW(bad.validate(), sk::ConfigError);
  EXPECT_THROW(static_cast<void>(sk::SkpcaTrainer(config(10, 3, 0))), sk::ConfigError);
}

TEST(SkpcaTrain, SinglePointBasis) {
  const Matrix A = random_normal(1, 4, 1);
  const auto model = sk::train(config(20, 4, 2), A);
  const Vector z = model.feature_map().apply(A.row(0).transpose());
  EXPECT_NEAR(std::abs(model.basis().col(0).dot(z) / z.norm()), 1.0, 1e-12);
  EXPECT_EQ(model.n_seen(), 1u);
}

TEST(SkpcaTrain, DeterministicReplay) {
  const Matrix A = random_normal(57, 3, 3);
  const auto a = sk::train(config(40, 6, 9), A);
  const auto b = sk::train(config(40, 6, 9), A);
  EXPECT_EQ(a.basis(), b.basis());
  EXPECT_EQ(a.singular_values(), b.singular_values());
  const auto c = sk::train(config(40, 6, 10), A);
  EXPECT_NE(a.basis(), c.basis());
}

TEST(SkpcaTrain, BasisOrthonormalAndMatchesSketch) {
  const Matrix A = random_normal(120, 5, 4);
  const auto cfg = config(50, 8, 5);
  sk::SkpcaTrainer trainer(cfg);
  for (Eigen::Index i = 0; i < A.rows(); ++i) trainer.push(A.row(i).transpose());
  const auto expected = trainer.sketch().basis();
  const auto model = trainer.finish();
  EXPECT_EQ(model.basis(), expected.W);
  EXPECT_LE((model.basis().transpose() * model.basis() - Matrix::Identity(8, 8)).norm(), 1e-8);
  EXPECT_EQ(model.n_seen(), 120u);
  EXPECT_EQ(model.ell(), 8u);
  EXPECT_EQ(model.m(), 50u);
  EXPECT_EQ(model.d(), 5u);
}

TEST(SkpcaTrain, EmptyStreamAndDimensionDrift) {
  EXPECT_THROW(sk::train(config(10, 2, 0), Matrix(0, 3)), sk::ContractViolation);
  sk::SkpcaTrainer trainer(config(10, 2, 0));
  trainer.push(Vector::Zero(3));
  trainer.push(Vector::Zero(3));
  try {
    trainer.push(Vector::Zero(4));
    FAIL() << "drift not detected";
  } catch (const sk::ContractViolation& e) {
    EXPECT_NE(std::string(e.what()).find("point 2"), std::string::npos) << e.what();
  }
}

TEST(SkpcaProject, RankOneStreamPointInsideSubspace) {
  Matrix A(5, 3);
  for (Eigen::Index i = 0; i < 5; ++i) A.row(i) << 0.3, -1.2, 0.5;
  const auto model = sk::train(config(30, 4, 6), A);
  const auto p = model.project(A.row(0).transpose(), 1);
  EXPECT_LE(p.residual, 1e-6 * p.lifted.norm());
}

TEST(SkpcaProject, NormsAndNesting) {
  const Matrix A = random_normal(80, 4, 7);
  const auto model = sk::train(config(60, 10, 8), A);
  const Matrix X = random_normal(20, 4, 9);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Vector x = X.row(i).transpose();
    const auto p1 = model.project(x, 1);
    const auto pl = model.project(x, 10);
    EXPECT_EQ(p1.loading.size(), 1);
    EXPECT_EQ(pl.loading.size(), 10);
    EXPECT_LE(pl.loading.norm(), pl.lifted.norm() + 1e-12);
    EXPECT_LE(pl.lifted.norm(), std::sqrt(2.0) + 1e-12);
    EXPECT_LE(pl.residual, p1.residual + 1e-12);
    EXPECT_GE(p1.residual, 0.0);
    EXPECT_EQ(pl.lifted, model.feature_map().apply(x));
    EXPECT_NEAR(pl.loading.head(1)(0), p1.loading(0), 1e-15);
    // Pythagoras: ||z||^2 = ||loading||^2 + residual^2.
    EXPECT_NEAR(pl.lifted.squaredNorm(), pl.loading.squaredNorm() + pl.residual * pl.residual, 1e-12);
  }
}

TEST(SkpcaProject, RejectsBadArguments) {
  const auto model = sk::train(config(20, 4, 1), random_normal(10, 3, 10));
  EXPECT_THROW(model.project(Vector::Zero(3), 0), sk::ContractViolation);
  EXPECT_THROW(model.project(Vector::Zero(3), 5), sk::ContractViolation);
  EXPECT_THROW(model.project(Vector::Zero(2), 1), sk::ContractViolation);
}

TEST(SkpcaReconstruct, SinglePoint) {
  const Matrix A = random_normal(1, 3, 11);
  const auto model = sk::train(config(25, 4, 12), random_normal(30, 3, 13));
  const Matrix G = model.reconstruct_gram(A);
  const Vector z = model.feature_map().apply(A.row(0).transpose());
  ASSERT_EQ(G.rows(), 1);
  EXPECT_NEAR(G(0, 0), (model.basis().transpose() * z).squaredNorm(), 1e-14);
}

TEST(SkpcaReconstruct, PsdAndLowRank) {
  const Matrix A = random_normal(60, 3, 14);
  const auto model = sk::train(config(40, 6, 15), A);
  const Matrix Gt = model.reconstruct_gram(A);
  EXPECT_TRUE(sk::is_symmetric(Gt, 0.0));
  const Vector ev = sk::sym_eigenvalues(Gt);
  EXPECT_GE(ev(ev.size() - 1), -1e-9 * 60);
  EXPECT_LE(ev(6), 1e-10 * ev(0));  // rank <= ell
  EXPECT_LE((Gt - model.factor(A) * model.factor(A).transpose()).norm(), 1e-12);
}

TEST(SkpcaProperties, SketchStepBoundAndTriangle) {
  // ||ZZ^T - ZWW^TZ^T||_2 <= (2/ell) ||Z||_F^2 <= (4/ell) n, deterministically.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix A = random_normal(200, 4, 20 + seed);
    for (std::size_t ell : {4u, 8u, 16u}) {
      const auto model = sk::train(config(64, ell, seed), A);
      const Matrix Z = model.feature_map().apply_batch(A);
      const Matrix ZZt = Z * Z.transpose();
      const Matrix Gt = model.reconstruct_gram(A);
      const double step = sk::spectral_norm(ZZt - Gt);
      EXPECT_LE(step, 2.0 / ell * Z.squaredNorm() + 1e-9);
      EXPECT_LE(Z.squaredNorm(), 2.0 * 200 + 1e-9);

      const Matrix G = sk::gram(model.feature_map().kernel(), A);
      const double total = sk::spectral_norm(G - Gt);
      EXPECT_LE(total, sk::spectral_norm(G - ZZt) + step + 1e-9);
    }
  }
}

TEST(SkpcaProperties, EndToEndSmallScale) {
  // n = 300 mixture, eps = 0.25: ||G - G~||_2 / n <= 0.25 on most seeds.
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    sk::MixtureSpec spec;
    spec.n = 300;
    spec.d = 10;
    spec.seed = seed;
    const Matrix A = sk::gen_gaussian_mixture(spec);
    const auto cfg = SkpcaConfig::from_error(0.25, 0.1, 300, sk::gaussian_kernel(), seed);
    const auto model = sk::train(cfg, A);
    const Matrix G = sk::gram(cfg.kernel, A);
    if (sk::spectral_error(G, model.reconstruct_gram(A)) <= 0.25) ++passes;
  }
  EXPECT_GE(passes, 4);
}

TEST(SkpcaSpace, PeakWithinFormula) {
  sk::EntryCounter counter;
  const std::size_t m = 200;
  const std::size_t ell = 10;
  const std::size_t d = 6;
  const auto model = sk::train(config(m, ell, 1), random_normal(500, d, 30), &counter);
  EXPECT_GT(counter.peak(), m * d);
  EXPECT_LE(counter.peak(), 3 * (m * d + m * ell));
  EXPECT_EQ(counter.current(), 0u);
}
