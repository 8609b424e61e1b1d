#include <benchmark/benchmark.h>

#include "coastcast/models.hpp"
#include "coastcast/rng.hpp"
#include "coastcast/shapley.hpp"
#include "coastcast/svr.hpp"
#include "coastcast/trees.hpp"

using namespace coastcast;

namespace {

void linear_data(std::size_t n, std::size_t d, Matrix& x, std::vector<double>& y) {
    Rng rng(17);
    x = Matrix(n, d);
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = rng.normal();
            s += (0.3 + 0.4 * static_cast<double>(j)) * x(i, j);
        }
        y[i] = s + rng.normal(0, 0.2);
    }
}

} // namespace

static void FitOls(benchmark::State& state) {
    Matrix x;
    std::vector<double> y;
    linear_data(static_cast<std::size_t>(state.range(0)), 10, x, y);
    for (auto _ : state) {
        auto m = fit_ols(x, y);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(FitOls)->RangeMultiplier(4)->Range(256, 16384);

static void FitSvrLinear(benchmark::State& state) {
    Matrix x;
    std::vector<double> y;
    linear_data(static_cast<std::size_t>(state.range(0)), 10, x, y);
    const SvrHyperParams params{1.0, 1.0, 0.1, SvrKernel::linear};
    for (auto _ : state) {
        auto m = fit_svr(x, y, params);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(FitSvrLinear)->Arg(100)->Arg(200)->Arg(400);

static void FitGbt(benchmark::State& state) {
    Matrix x;
    std::vector<double> y;
    linear_data(static_cast<std::size_t>(state.range(0)), 10, x, y);
    GbtParams params;
    params.rounds = 50;
    for (auto _ : state) {
        auto m = fit_gbt(x, y, params);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(FitGbt)->Arg(500)->Arg(2000);

static void ShapleyExact(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    Matrix x;
    std::vector<double> y;
    linear_data(200, d, x, y);
    GbtParams params;
    params.rounds = 30;
    const GbtModel model = fit_gbt(x, y, params);
    Matrix background(20, d);
    Rng rng(5);
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t j = 0; j < d; ++j) background(i, j) = rng.normal();
    }
    std::vector<double> probe(d, 0.3);
    for (auto _ : state) {
        auto res = shapley_exact(model, probe, background);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(ShapleyExact)->DenseRange(6, 12, 2);

BENCHMARK_MAIN();
