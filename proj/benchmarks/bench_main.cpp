#include <benchmark/benchmark.h>

#include <random>

#include "aqtlab/adversaries.hpp"
#include "aqtlab/boundedness.hpp"
#include "aqtlab/bundling.hpp"
#include "aqtlab/engine.hpp"
#include "aqtlab/flows.hpp"

using namespace aqtlab;

namespace {

// One packet per round at a uniformly random buffer: (1, 0, 1)-ish traffic
// with plenty of injection rounds for the checker to chew on.
InjectionPattern scattered(int n, std::int64_t rounds, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, n);
  std::vector<PacketSpec> items;
  items.reserve(static_cast<std::size_t>(rounds));
  for (std::int64_t r = 0; r < rounds; ++r) items.push_back(PacketSpec{r, Route{pick(rng)}, Rational{1}});
  return InjectionPattern(n, rounds - 1, std::move(items));
}

void BM_CheckLocal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto pattern = scattered(n, state.range(1), 7);
  const auto params = BoundParams::uniform(n, Rational{1}, Rational{0}, Rational{1});
  for (auto _ : state) benchmark::DoNotOptimize(check_local(pattern, params));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pattern.size()));
}
BENCHMARK(BM_CheckLocal)->Args({16, 256})->Args({16, 1024})->Args({64, 1024})->Args({64, 4096});

void BM_CheckLocalBruteforce(benchmark::State& state) {
  const auto pattern = scattered(8, 12, 11);
  const auto params = BoundParams::uniform(8, Rational{1}, Rational{0}, Rational{1});
  for (auto _ : state) benchmark::DoNotOptimize(check_local_bruteforce(pattern, params));
}
BENCHMARK(BM_CheckLocalBruteforce);

void BM_SimulateRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto protocol = state.range(1) ? Protocol::oed : Protocol::greedy;
  const PathTopology topology(n, 1);
  for (auto _ : state) {
    ObliviousRandomAdversary adversary(n, 1, 0, 3, 50);
    benchmark::DoNotOptimize(run(topology, adversary, decision_rule(protocol), 50 * adversary.epoch_length()));
  }
  state.SetLabel(std::string(to_string(protocol)));
}
BENCHMARK(BM_SimulateRandom)->Args({16, 1})->Args({16, 0})->Args({64, 1})->Args({256, 1});

void BM_SimulateLowerBound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PathTopology topology(n, 1);
  for (auto _ : state) {
    LowerBoundAdversary adversary(n, 1, 4);
    benchmark::DoNotOptimize(run(topology, adversary, oed_decision, adversary.rounds_needed()));
  }
}
BENCHMARK(BM_SimulateLowerBound)->Arg(64)->Arg(1024)->Arg(4096);

void BM_SimulateWithInvariants(benchmark::State& state) {
  const int n = 32;
  const PathTopology topology(n, 1);
  RunOptions options;
  options.invariants = InvariantConfig{};
  for (auto _ : state) {
    ObliviousRandomAdversary adversary(n, 1, 0, 5, 20);
    benchmark::DoNotOptimize(run(topology, adversary, oed_decision, 20 * adversary.epoch_length(), options));
  }
}
BENCHMARK(BM_SimulateWithInvariants);

void BM_DiscretizeWave(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto wave = wave_flows(n);
  for (auto _ : state) benchmark::DoNotOptimize(discretize(wave, 20 * n));
}
BENCHMARK(BM_DiscretizeWave)->Arg(16)->Arg(64);

void BM_HeteroBundle(benchmark::State& state) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> pick(1, 16), size(1, 6);
  std::vector<PacketSpec> items;
  for (std::int64_t r = 0; r < 2000; ++r) items.push_back(PacketSpec{r, Route{pick(rng)}, Rational(size(rng), 3)});
  const InjectionPattern pattern(16, 1999, std::move(items));
  for (auto _ : state) benchmark::DoNotOptimize(hetero_bundle(pattern, 2));
}
BENCHMARK(BM_HeteroBundle);

}  // namespace

BENCHMARK_MAIN();
