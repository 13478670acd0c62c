#include <benchmark/benchmark.h>

#include "tafl/notation.hpp"
#include "tafl/rules.hpp"
#include "tafl/solver.hpp"

using namespace tafl;

namespace {

void BM_LegalMoves(benchmark::State& state) {
    const GameState st = brandubh();
    for (auto _ : state) benchmark::DoNotOptimize(legal_moves(st));
}
BENCHMARK(BM_LegalMoves);

void BM_Perft(benchmark::State& state) {
    const GameState st = brandubh();
    std::uint64_t n = 0;
    for (auto _ : state) n = perft(st, static_cast<int>(state.range(0)));
    state.counters["nodes/s"] = benchmark::Counter(static_cast<double>(n), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Perft)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PerftParallel(benchmark::State& state) {
    const GameState st = brandubh();
    std::uint64_t n = 0;
    for (auto _ : state) n = perft_parallel(st, static_cast<int>(state.range(0)));
    state.counters["nodes/s"] = benchmark::Counter(static_cast<double>(n), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_PerftParallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Solve(benchmark::State& state) {
    const GameState st = brandubh();
    for (auto _ : state) benchmark::DoNotOptimize(solve(st, {static_cast<int>(state.range(0)), std::nullopt, std::nullopt}));
}
BENCHMARK(BM_Solve)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SolveParallel(benchmark::State& state) {
    const GameState st = brandubh();
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_parallel(st, {static_cast<int>(state.range(0)), std::nullopt, std::nullopt}));
}
BENCHMARK(BM_SolveParallel)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
