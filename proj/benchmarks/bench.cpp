#include <benchmark/benchmark.h>

#include <vector>

#include "coopeq/equilibrium.hpp"
#include "coopeq/games.hpp"
#include "coopeq/oracle.hpp"
#include "coopeq/preferences.hpp"
#include "coopeq/stats.hpp"

namespace {

using namespace coopeq;

void SolvePgg(benchmark::State& state) {
  const auto spec = GameSpec::make_pgg(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec));
}
BENCHMARK(SolvePgg)->Arg(4)->Arg(40)->Arg(1000);

void SolveNpd(benchmark::State& state) {
  const auto spec = GameSpec::make_npd(static_cast<int>(state.range(0)), 0.3, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(solve(spec));
}
BENCHMARK(SolveNpd)->Arg(2)->Arg(11)->Arg(100);

void ClosedForecast(benchmark::State& state) {
  const auto spec = GameSpec::make_pgg(40, 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(forecast(spec, CoalitionStructure::FullyCooperative));
}
BENCHMARK(ClosedForecast);

// The brute-force reconstruction enumerates 2^(n-1) deviating subsets; this is
// the oracle cost the closed forms avoid.
void BruteForecast(benchmark::State& state) {
  const auto spec = GameSpec::make_pgg(static_cast<int>(state.range(0)), 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        oracle::generic_forecast(spec, CoalitionStructure::FullyCooperative));
}
BENCHMARK(BruteForecast)->Arg(6)->Arg(10);

void ExactRankSum(benchmark::State& state) {
  const std::vector<double> a{1.5, 3.2, 4.8, 7.1, 9.9, 11.4, 13.0, 15.8};
  const std::vector<double> b{2.1, 3.9, 5.5, 6.6, 8.8, 12.2, 14.1, 16.3};
  for (auto _ : state) benchmark::DoNotOptimize(stats::rank_sum(a, b));
}
BENCHMARK(ExactRankSum);

void CooperativeFraction(benchmark::State& state) {
  auto pop = PopulationSpec::default_for(PreferenceModel::FehrSchmidt);
  pop.sample_count = static_cast<std::size_t>(state.range(0));
  const auto spec = GameSpec::make_pgg(8, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mu_fraction(pop, spec));
}
BENCHMARK(CooperativeFraction)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
