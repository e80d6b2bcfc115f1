#include <benchmark/benchmark.h>

#include <vector>

#include "spde_mlmc/spde_mlmc.hpp"

using namespace spde_mlmc;

static void BM_EulerStep(benchmark::State& state) {
    const LevelGeometry g = make_level(static_cast<int>(state.range(0)));
    const SemiImplicitStepper stepper(g, assemble(g));
    NodalField u = initial_field(g);
    std::vector<double> load(g.dofs, 1e-3), scratch;
    const DriftSpec none = DriftSpec::zero();
    for (auto _ : state) {
        stepper.step(u.values(), none, load, scratch);
        benchmark::DoNotOptimize(u.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.dofs));
}
BENCHMARK(BM_EulerStep)->DenseRange(4, 10, 2);

static void BM_NoiseLoad(benchmark::State& state) {
    const LevelGeometry g = make_level(static_cast<int>(state.range(0)));
    const ProjectionMatrix proj = projection_matrix(g, g.dofs);
    const KLBlock block = sample_kl_block({1, static_cast<std::uint32_t>(g.level), 0, 0, 0}, g, g.dofs, {});
    std::vector<double> out(g.dofs);
    std::uint64_t k = 1;
    for (auto _ : state) {
        noise_load(block, k, proj, out);
        benchmark::DoNotOptimize(out.data());
        k = k % g.steps + 1;
    }
}
BENCHMARK(BM_NoiseLoad)->DenseRange(3, 6);

static void BM_SampleKLBlock(benchmark::State& state) {
    const LevelGeometry g = make_level(static_cast<int>(state.range(0)));
    std::uint64_t sample = 0;
    for (auto _ : state) {
        const StreamCoordinate c{7, static_cast<std::uint32_t>(g.level), static_cast<std::uint32_t>(sample++), 0, 0};
        const KLBlock b = sample_kl_block(c, g, g.dofs, {});
        benchmark::DoNotOptimize(b.step(1).data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.dofs * g.steps));
}
BENCHMARK(BM_SampleKLBlock)->DenseRange(3, 6);

static void BM_SamplePair(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const PathSampler sampler(level);
    std::uint64_t sample = 0;
    for (auto _ : state) {
        const StreamCoordinate c{3, static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(sample++), 0, 0};
        const SamplePair p = sampler.sample_pair(level, 1, c);
        benchmark::DoNotOptimize(p.fine.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(PathSampler::path_work(level)));
}
BENCHMARK(BM_SamplePair)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
