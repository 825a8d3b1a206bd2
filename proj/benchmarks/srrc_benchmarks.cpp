#include <benchmark/benchmark.h>

#include <random>

#include "srrc/srrc.hpp"

using namespace srrc;

namespace {

Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = normal(gen);
    }
    return m;
}

void BM_SparseLstsq(benchmark::State& state) {
    const Index n = state.range(0);
    const Matrix a = gaussian(4 * n, n, 1);
    const Matrix y = gaussian(4 * n, 3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(sparse_lstsq(a, y, {1e-6, 50, 1e-8}));
}
BENCHMARK(BM_SparseLstsq)->Arg(10)->Arg(40)->Arg(120);

void BM_EthMap(benchmark::State& state) {
    const Vector x = gaussian(6, 1, 3).col(0);
    const int p = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(eth_map(x, p));
}
BENCHMARK(BM_EthMap)->DenseRange(1, 4);

void BM_CompressionMatrix(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compression_matrix(3, 2, p, 1.0, default_grouping_eps(1.0, p), 7));
    }
}
BENCHMARK(BM_CompressionMatrix)->DenseRange(1, 4);

void BM_Compress(benchmark::State& state) {
    const CompressionMatrix r = compression_matrix_exact(3, 2, 3);
    const Vector z = eth_map(gaussian(6, 1, 4).col(0), 3);
    for (auto _ : state) benchmark::DoNotOptimize(compress(r, z));
}
BENCHMARK(BM_Compress);

void BM_TrainChaotic(benchmark::State& state) {
    const TimeSeries s = integrate(FinancialParams::chaotic(), SimulationGrid{});
    const TimeSeries train = s.slice(0, state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train_autoregressive(train, {1, 3}, {1e-7, 50, 1e-7}, 0));
}
BENCHMARK(BM_TrainChaotic)->Arg(800)->Arg(6000)->Unit(benchmark::kMillisecond);

void BM_Forecast(benchmark::State& state) {
    const TimeSeries s = integrate(FinancialParams::periodic(), SimulationGrid{});
    const RRCModel m = train_autoregressive(s.slice(0, 801), {1, 3}, {1e-5, 50, 1e-5}, 0);
    const Vector seed = delay_embed(s, 1, 801);
    for (auto _ : state) benchmark::DoNotOptimize(forecast(m, seed, state.range(0)));
}
BENCHMARK(BM_Forecast)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(integrate(FinancialParams::chaotic(), SimulationGrid{}));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
