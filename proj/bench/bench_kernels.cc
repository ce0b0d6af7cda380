// Parallel kernels against their serial references. Thread count follows
// OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include "reqc/crystal.h"
#include "reqc/nodesearch.h"
#include "reqc/readout.h"

using namespace reqc;

namespace {

const crystal::DopantEnsemble& ensemble() {
    static const auto ens = crystal::place_dopants(crystal::HostMaterial{}, 0.01, 40.0, 1);
    return ens;
}

void BM_NearestNeighbor(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(crystal::nearest_neighbor_distances(ensemble()));
    state.counters["ions"] = static_cast<double>(ensemble().dopants.size());
}

void BM_NearestNeighborReference(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(crystal::nearest_neighbor_distances_reference(ensemble()));
}

const std::vector<double> kDurations{1e-6, 2e-6, 5e-6, 10e-6, 20e-6};

void BM_FidelityCurve(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(readout::fidelity_curve(readout::ReadoutConfig{}, kDurations, state.range(0), 3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FidelityCurveReference(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            readout::fidelity_curve_reference(readout::ReadoutConfig{}, kDurations, state.range(0), 3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Buffer(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(readout::buffer_protocol(readout::ReadoutConfig{}, 4, state.range(0), 3));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BufferReference(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(readout::buffer_protocol_reference(readout::ReadoutConfig{}, 4, state.range(0), 3));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

nodesearch::SweepSpec sweep_spec(std::int64_t trials) {
    nodesearch::SweepSpec s;
    s.concentrations = {0.03, 0.05};
    s.trials = trials;
    s.seed = 5;
    return s;
}

void BM_Sweep(benchmark::State& state) {
    const auto spec = sweep_spec(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(nodesearch::sweep_concentration(spec));
}

void BM_SweepReference(benchmark::State& state) {
    const auto spec = sweep_spec(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(nodesearch::sweep_concentration_reference(spec));
}

}  // namespace

BENCHMARK(BM_NearestNeighbor)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestNeighborReference)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FidelityCurve)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FidelityCurveReference)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Buffer)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BufferReference)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepReference)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
