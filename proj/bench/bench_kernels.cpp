// Serial reference loops against the OpenMP kernels on a hyperbolic ball
// grid. Run with OMP_NUM_THREADS set to compare thread counts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "iuws/elliptic.hpp"
#include "iuws/kernels.hpp"
#include "iuws/mesh.hpp"

namespace {

using namespace iuws;

SystemPtr grid(double h)
{
    return build_system(ModelSurface::hyperbolic(), make_window(-0.8, 0.8, -0.8, 0.8, h),
                        {GeodesicBall{2.0}, {0, 0}});
}

const SystemPtr& cached(int cells)
{
    static std::vector<std::pair<int, SystemPtr>> cache;
    for (const auto& [c, s] : cache) {
        if (c == cells) return s;
    }
    cache.emplace_back(cells, grid(1.6 / cells));
    return cache.back().second;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    std::vector<double> x(n);
    for (double& v : x) v = U(rng);
    return x;
}

template <bool Parallel>
void shifted_apply(benchmark::State& state)
{
    const SystemPtr& s = cached(static_cast<int>(state.range(0)));
    const auto x = noise(s->size(), 1);
    std::vector<double> y(s->size());
    for (auto _ : state) {
        if constexpr (Parallel) kernels::shifted_apply(s->stencil(), s->mass(), 0.5, 1.0, x, y);
        else kernels::serial::shifted_apply(s->stencil(), s->mass(), 0.5, 1.0, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s->size()));
}

template <bool Parallel>
void weighted_dot(benchmark::State& state)
{
    const SystemPtr& s = cached(static_cast<int>(state.range(0)));
    const auto x = noise(s->size(), 2), y = noise(s->size(), 3);
    for (auto _ : state) {
        double d = Parallel ? kernels::weighted_dot(x, y, s->mass())
                            : kernels::serial::weighted_dot(x, y, s->mass());
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s->size()));
}

template <bool Parallel>
void axpy(benchmark::State& state)
{
    const SystemPtr& s = cached(static_cast<int>(state.range(0)));
    const auto x = noise(s->size(), 4);
    std::vector<double> y = noise(s->size(), 5);
    for (auto _ : state) {
        if constexpr (Parallel) kernels::axpy(1e-9, x, y);
        else kernels::serial::axpy(1e-9, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s->size()));
}

void torsion_solve(benchmark::State& state)
{
    const SystemPtr& s = cached(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(torsion(s).sup);
}

}  // namespace

BENCHMARK(shifted_apply<false>)->Name("shifted_apply/serial")->Arg(160)->Arg(640);
BENCHMARK(shifted_apply<true>)->Name("shifted_apply/omp")->Arg(160)->Arg(640);
BENCHMARK(weighted_dot<false>)->Name("weighted_dot/serial")->Arg(160)->Arg(640);
BENCHMARK(weighted_dot<true>)->Name("weighted_dot/omp")->Arg(160)->Arg(640);
BENCHMARK(axpy<false>)->Name("axpy/serial")->Arg(160)->Arg(640);
BENCHMARK(axpy<true>)->Name("axpy/omp")->Arg(160)->Arg(640);
BENCHMARK(torsion_solve)->Arg(160)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
