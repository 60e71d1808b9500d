// Serial references against the OpenMP kernels on random loopy networks.
// Run with --benchmark_filter=... and OMP_NUM_THREADS to compare thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "csibn/cutset.hpp"
#include "csibn/inference.hpp"
#include "csibn/random_network.hpp"

namespace {

using namespace csibn;

Network loopy(std::size_t variables) {
    std::mt19937_64 rng(7 + variables);
    RandomNetworkOptions o;
    o.variables = variables;
    o.max_parents = 3;
    return random_loopy_network(rng, o);
}

Query last_variable_query(const Network& net) { return {net.variables().back().name, {}}; }

void BM_enumerate_serial(benchmark::State& state) {
    Network net = loopy(static_cast<std::size_t>(state.range(0)));
    Query q = last_variable_query(net);
    for (auto _ : state) benchmark::DoNotOptimize(query_enumerate_serial(net, q));
}

void BM_enumerate_parallel(benchmark::State& state) {
    Network net = loopy(static_cast<std::size_t>(state.range(0)));
    Query q = last_variable_query(net);
    for (auto _ : state) benchmark::DoNotOptimize(query_enumerate(net, q));
}

void BM_cutset_serial(benchmark::State& state) {
    Network net = loopy(static_cast<std::size_t>(state.range(0)));
    Query q = last_variable_query(net);
    CutsetTree cutset = build_conditional_cutset(net);
    state.counters["branches"] = static_cast<double>(branch_contexts(cutset).size());
    for (auto _ : state) benchmark::DoNotOptimize(cutset_infer_serial(net, q, cutset));
}

void BM_cutset_parallel(benchmark::State& state) {
    Network net = loopy(static_cast<std::size_t>(state.range(0)));
    Query q = last_variable_query(net);
    CutsetTree cutset = build_conditional_cutset(net);
    state.counters["branches"] = static_cast<double>(branch_contexts(cutset).size());
    for (auto _ : state) benchmark::DoNotOptimize(cutset_infer(net, q, cutset));
}

}  // namespace

BENCHMARK(BM_enumerate_serial)->Arg(14)->Arg(18)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_enumerate_parallel)->Arg(14)->Arg(18)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cutset_serial)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cutset_parallel)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
