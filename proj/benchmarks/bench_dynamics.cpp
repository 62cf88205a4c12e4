#include <benchmark/benchmark.h>

#include "evodyn/dynamics.hpp"
#include "evodyn/games.hpp"
#include "evodyn/integrate.hpp"
#include "evodyn/protocols.hpp"

using namespace evodyn;

namespace {

PayoffFunction hypnodisk_twin() { return penalize(add_twin(hypnodisk_game(HypnodiskParams{})), 3, 0.005); }

void BM_SelectionProb(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  Rng rng(1);
  const auto x = interior_state(n, rng, 0.01);
  const auto rule = state.range(2) ? SelectionRule::majority(MDistribution::fixed(m))
                                   : SelectionRule::list_sample(MDistribution::fixed(m));
  for (auto _ : state) benchmark::DoNotOptimize(selection_prob(rule, 0, x));
}
BENCHMARK(BM_SelectionProb)->ArgsProduct({{2, 4, 8}, {3, 6, 12}, {0, 1}});

void BM_SelectionProbMc(benchmark::State& state) {
  const PopulationState x{0.1, 0.2, 0.3, 0.4};
  const auto rule = SelectionRule::majority(MDistribution::fixed(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(selection_prob_mc(rule, 0, x, 100000, 7));
}
BENCHMARK(BM_SelectionProbMc)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_MotherField(benchmark::State& state) {
  const auto f = hypnodisk_twin();
  const auto field = mother_field({SelectionRule::list_sample(MDistribution::fixed(3)), AdoptionRule::pairwise()}, f);
  const PopulationState x{0.3, 0.3, 0.2, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(field(f, x));
}
BENCHMARK(BM_MotherField);

void BM_ClosedFormField(benchmark::State& state) {
  const auto f = rps_feeble_twin(0.04).payoff();
  const auto field = mother_field({SelectionRule::retry_other(MDistribution::fixed(4)), AdoptionRule::pairwise()}, f);
  const PopulationState x{0.1, 0.2, 0.3, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(field(f, x));
}
BENCHMARK(BM_ClosedFormField);

void BM_IntegrateRk45(benchmark::State& state) {
  const auto f = hypnodisk_twin();
  const auto field = mother_field({SelectionRule::list_sample(MDistribution::fixed(3)), AdoptionRule::pairwise()}, f);
  IntegratorConfig cfg;
  cfg.horizon = static_cast<double>(state.range(0));
  cfg.sample_stride = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(field, f, PopulationState{0.4, 0.3, 0.2, 0.1}, cfg));
}
BENCHMARK(BM_IntegrateRk45)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_IntegrateRk4(benchmark::State& state) {
  const auto f = rps_feeble_twin(0.04).payoff();
  const auto field = mother_field({SelectionRule::retry_other(MDistribution::fixed(4)), AdoptionRule::pairwise()}, f);
  IntegratorConfig cfg;
  cfg.method = Rk4Fixed{0.01};
  cfg.horizon = 100;
  cfg.sample_stride = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(field, f, PopulationState{0.1, 0.2, 0.3, 0.4}, cfg));
}
BENCHMARK(BM_IntegrateRk4)->Unit(benchmark::kMillisecond);

void BM_AsymptoticShare(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_share(6, 0.5));
}
BENCHMARK(BM_AsymptoticShare);

}  // namespace

BENCHMARK_MAIN();
