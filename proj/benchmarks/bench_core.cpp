#include <benchmark/benchmark.h>

#include "nflab/rng.hpp"
#include "nflab/theory_lab.hpp"

using namespace nflab;

namespace {

void BM_KeyedPermutationStep(benchmark::State& state) {
  const std::uint64_t domain = state.range(0);
  const KeyedPermutation perm(domain, 0xfeedULL);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perm(i));
    i = (i + 1) % domain;
  }
  state.SetComplexityN(static_cast<std::int64_t>(domain));
}
BENCHMARK(BM_KeyedPermutationStep)->RangeMultiplier(8)->Range(16, 1 << 21)->Complexity();

void BM_RandomEnumerationFullCycle(benchmark::State& state) {
  const std::uint64_t n = state.range(0);
  const ObjectiveFunction f(SearchSpace(n), ValueAlphabet(1), std::vector<ValueIndex>(n, 0));
  const auto algorithm = random_enumeration();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(*algorithm, f, n, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RandomEnumerationFullCycle)->Arg(256)->Arg(4096);

void BM_OrbitEnumeration(benchmark::State& state) {
  const auto x = static_cast<std::uint64_t>(state.range(0));
  std::vector<ValueIndex> table(x);
  for (std::uint64_t p = 0; p < x; ++p) table[p] = static_cast<ValueIndex>(p % 3);
  const ObjectiveFunction f(SearchSpace(x), ValueAlphabet(3), std::move(table));
  for (auto _ : state) {
    benchmark::DoNotOptimize(orbit(f));
  }
}
BENCHMARK(BM_OrbitEnumeration)->DenseRange(5, 9);

void BM_ExactExpectation(benchmark::State& state) {
  const auto x = static_cast<std::uint64_t>(state.range(0));
  std::vector<ValueIndex> table(x);
  for (std::uint64_t p = 0; p < x; ++p) table[p] = static_cast<ValueIndex>(p % 3);
  const auto fc =
      FunctionClass::uniform(orbit(ObjectiveFunction(SearchSpace(x), ValueAlphabet(3), table)));
  const auto algorithm = random_with_replacement();
  const auto measure = best_so_far();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        expected_performance(*algorithm, fc, measure, 2 * x, Mode::exact()));
  }
}
BENCHMARK(BM_ExactExpectation)->DenseRange(3, 5);

void BM_PExactLongTail(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(p_exact(100, 10, 200));
  }
}
BENCHMARK(BM_PExactLongTail);

}  // namespace

BENCHMARK_MAIN();
