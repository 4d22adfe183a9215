#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "pangle/data.hpp"
#include "pangle/gaussian.hpp"
#include "pangle/geometry.hpp"
#include "pangle/nsc.hpp"
#include "pangle/transforms.hpp"

using namespace pangle;

static void BM_PrincipalAngles(benchmark::State& state) {
    const Index n = state.range(0);
    const Index d = state.range(1);
    std::mt19937_64 rng(1);
    const Subspace a = random_subspace(n, d, rng);
    const Subspace b = random_subspace(n, d, rng);
    for (auto _ : state) benchmark::DoNotOptimize(principal_angles(a, b));
}
BENCHMARK(BM_PrincipalAngles)->Args({4, 2})->Args({10, 1})->Args({100, 5})->Args({400, 20});

static void BM_MapClassify(benchmark::State& state) {
    const Index n = state.range(0);
    const GeneratedGmm gen = gen_gmm_classes(3, n, 2, 1e-2, 64, 2);
    const MapClassifier clf{std::span<const GaussianClassModel>(gen.models)};
    const Matrix& x = gen.dataset.samples();
    Index j = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(clf.classify(x.col(j)));
        j = (j + 1) % x.cols();
    }
}
BENCHMARK(BM_MapClassify)->Arg(4)->Arg(10)->Arg(100);

static void BM_NscClassify(benchmark::State& state) {
    const GeneratedSubspaceData gen = gen_uniform_subspace_data(3, 100, 5, 0.5, 3, 64);
    const Matrix& x = gen.dataset.samples();
    Index j = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(nsc_classify(x.col(j), gen.bases));
        j = (j + 1) % x.cols();
    }
}
BENCHMARK(BM_NscClassify);

static void BM_ErKernel(benchmark::State& state) {
    const PrincipalAngles angles(Vector::Constant(2, 0.6));
    Vector alpha(2);
    alpha << 0.7, -1.2;
    for (auto _ : state) benchmark::DoNotOptimize(er_kernel(angles, alpha, 0.1));
}
BENCHMARK(BM_ErKernel);

static void BM_TraitGradient(benchmark::State& state) {
    const Index n = state.range(0);
    const GeneratedGmm gen = gen_gmm_classes(3, n, 1, 1e-2, 100, 4);
    const Matrix x = gen.dataset.grouped_samples();
    const Matrix t = build_target_gram(gen.dataset).dense();
    const TraitProblem problem(x, t);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    Matrix a(3, n);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(problem.gradient(a));
}
BENCHMARK(BM_TraitGradient)->Arg(10)->Arg(100);

static void BM_TrainTrait(benchmark::State& state) {
    const GeneratedGmm gen = gen_gmm_classes(3, 10, 1, 1e-2, 100, 6);
    TraitConfig cfg;
    cfg.target_dim = 3;
    for (auto _ : state) benchmark::DoNotOptimize(train_trait(gen.dataset, cfg, 1));
}
BENCHMARK(BM_TrainTrait)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
