#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "alphacross/analytic.hpp"
#include "alphacross/blotter.hpp"
#include "alphacross/simulate.hpp"

using namespace alphacross;

namespace {

Blotter random_blotter(std::mt19937_64& rng, int symbols, const std::string& id) {
    std::uniform_int_distribution<std::int64_t> cents(-10'000'000'00, 10'000'000'00);
    Blotter b(id, Cents::from_dollars(1'000'000'000));
    for (int s = 0; s < symbols; ++s) b.add("SYM" + std::to_string(s), Cents{cents(rng)});
    return b;
}

void BM_CrossPair(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto symbols = static_cast<int>(state.range(0));
    auto a = random_blotter(rng, symbols, "a");
    auto b = random_blotter(rng, symbols, "b");
    for (auto _ : state) benchmark::DoNotOptimize(cross_pair(a, b));
    state.SetItemsProcessed(state.iterations() * symbols);
}
BENCHMARK(BM_CrossPair)->Arg(10)->Arg(500)->Arg(3000);

void BM_TurnoverClosed(benchmark::State& state) {
    int n = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic::turnover_closed(0.1, 0.3, n));
        n = n % 4096 + 1;
    }
}
BENCHMARK(BM_TurnoverClosed);

void BM_Tournament(benchmark::State& state) {
    sim::EnsembleConfig c;
    c.n_streams = static_cast<int>(state.range(0));
    c.n_stocks = 64;
    c.base_correlation = 0.25;
    c.paths = 200;
    c.seed = 3;
    auto e = sim::generate_ensemble(c);
    for (auto _ : state) benchmark::DoNotOptimize(sim::tournament_turnover(e, {static_cast<int>(state.range(1))}));
    state.SetItemsProcessed(state.iterations() * c.paths);
}
BENCHMARK(BM_Tournament)->Args({64, 1})->Args({256, 1})->Args({256, 0})->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
