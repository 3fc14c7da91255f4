#include "hzreach/config.hpp"
#include "hzreach/parallel.hpp"
#include "hzreach/simulate.hpp"

#include <benchmark/benchmark.h>

using namespace hzreach;

namespace
{

// data-driven reachable set of the benchmark system after `steps` steps
const HybridZonotope& reach_set(int steps)
{
    static std::vector<HybridZonotope> cache;
    if (cache.empty())
    {
        const ExperimentConfig c = benchmark_config();
        const auto models = identify_models(transitions(simulate_data(c)), c.system);
        for (const auto& f : reach_horizon(lift_zonotope(c.initial_set), models, c.system.regions,
                                           {lift_zonotope(c.input_set)}, c.system.noise_w, 4))
            cache.push_back(f.union_set);
    }
    return cache.at(static_cast<std::size_t>(steps));
}

Matrix probe_points(const HybridZonotope& z, int count)
{
    const auto hull = *oracle::interval_hull(z);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix p(z.dim(), count);
    for (int j = 0; j < count; ++j)
        for (Index i = 0; i < z.dim(); ++i)
            p(i, j) = hull.lower(i) + unit(rng) * (hull.upper(i) - hull.lower(i));
    return p;
}

void support_serial(benchmark::State& state)
{
    const HybridZonotope& z = reach_set(static_cast<int>(state.range(0)));
    const Matrix dirs = oracle::spread_directions(2, 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle::reference::support_batch(z, dirs));
    state.counters["binaries"] = static_cast<double>(z.num_binary());
}

void support_parallel(benchmark::State& state)
{
    const HybridZonotope& z = reach_set(static_cast<int>(state.range(0)));
    const Matrix dirs = oracle::spread_directions(2, 64);
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle::support_batch(z, dirs));
    state.counters["binaries"] = static_cast<double>(z.num_binary());
    state.counters["threads"] = detail::thread_count();
}

void membership_serial(benchmark::State& state)
{
    const HybridZonotope& z = reach_set(static_cast<int>(state.range(0)));
    const Matrix pts = probe_points(z, 100);
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle::reference::membership_batch(z, pts));
}

void membership_parallel(benchmark::State& state)
{
    const HybridZonotope& z = reach_set(static_cast<int>(state.range(0)));
    const Matrix pts = probe_points(z, 100);
    for (auto _ : state)
        benchmark::DoNotOptimize(oracle::membership_batch(z, pts));
    state.counters["threads"] = detail::thread_count();
}

} // namespace

BENCHMARK(support_serial)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(support_parallel)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(membership_serial)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(membership_parallel)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
