#include <stream_kpca/baselines.hpp>
#include <stream_kpca/data.hpp>
#include <stream_kpca/fd.hpp>
#include <stream_kpca/rff.hpp>
#include <stream_kpca/rng.hpp>
#include <stream_kpca/skpca.hpp>

#include <benchmark/benchmark.h>

namespace sk = stream_kpca;

namespace {

sk::Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  sk::Rng rng(seed, "bench");
  sk::Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = rng.normal();
  return M;
}

void BM_FdInsert(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto ell = static_cast<std::size_t>(state.range(1));
  const sk::Matrix rows = gaussian(256, static_cast<Eigen::Index>(m), 1);
  sk::FdSketch sketch(ell, m);
  Eigen::Index i = 0;
  for (auto _ : state) {
    sketch.insert(rows.row(i).transpose());
    i = (i + 1) % rows.rows();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FdInsert)->Args({256, 16})->Args({1024, 16})->Args({1024, 64});

void BM_FeatureMapApply(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto fm = sk::FeatureMap::sample(sk::gaussian_kernel(1.0), m, d, 3);
  const sk::Vector x = gaussian(1, static_cast<Eigen::Index>(d), 2).row(0).transpose();
  sk::Vector out(static_cast<Eigen::Index>(m));
  for (auto _ : state) {
    fm.apply_into(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FeatureMapApply)->Args({256, 20})->Args({1024, 20})->Args({1024, 100});

struct ProjectionFixture {
  sk::Matrix train;
  sk::Vector probe;
};

ProjectionFixture projection_fixture(std::size_t d) {
  sk::SyntheticSpec spec;
  spec.n = 2000;
  spec.d = d;
  spec.s = d / 2;
  spec.seed = 5;
  sk::Matrix A = sk::gen_random_noisy(spec);
  sk::Vector probe = A.row(0).transpose();
  return {std::move(A), std::move(probe)};
}

void BM_SkpcaProject(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto fx = projection_fixture(20);
  sk::SkpcaConfig config;
  config.m = m;
  config.ell = 16;
  config.kernel = sk::gaussian_kernel(4.0);
  config.seed = 7;
  const auto model = sk::train(config, fx.train);
  for (auto _ : state) {
    auto p = model.project(fx.probe, 5);
    benchmark::DoNotOptimize(p.residual);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SkpcaProject)->Arg(256)->Arg(1024);

void BM_NystromProject(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  const auto fx = projection_fixture(20);
  const auto model = sk::nystrom_train(sk::gaussian_kernel(4.0), c, c, 7, fx.train);
  for (auto _ : state) {
    auto p = model.project(fx.probe);
    benchmark::DoNotOptimize(p.residual);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_NystromProject)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
