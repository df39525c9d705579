#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gkpolicy/datagen.hpp"
#include "gkpolicy/features.hpp"
#include "gkpolicy/gametheory.hpp"
#include "gkpolicy/models.hpp"
#include "gkpolicy/simulator.hpp"

namespace {

using namespace gkp;

std::vector<PenaltyRecord> dataset(std::size_t n) {
  datagen::GeneratorConfig c;
  c.n_kicks = n;
  c.seed = 1;
  return datagen::generate(c);
}

void BM_SolveRandomGame(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  game::MatrixGame g;
  g.row_labels = {"a", "b", "c", "d"};
  g.col_labels = {"x", "y", "z"};
  g.values.resize(12);
  for (auto _ : state) {
    for (auto& v : g.values) v = u(rng);
    benchmark::DoNotOptimize(game::solve_zero_sum(g));
  }
}
BENCHMARK(BM_SolveRandomGame);

void BM_ReachModel(benchmark::State& state) {
  const UncertaintyParams p{0.7, 0.7};
  double d = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::p_save_given_correct(d, 3.0, p));
    d = d > 5.0 ? 0.0 : d + 0.001;
  }
}
BENCHMARK(BM_ReachModel);

void BM_EvaluateLatePolicy(benchmark::State& state) {
  std::vector<PenaltyRecord> recs;
  for (const auto& r : dataset(static_cast<std::size_t>(state.range(0)))) {
    if (on_target(r)) recs.push_back(r);
  }
  const auto tables = sim::estimate_tables(recs);
  const PolicySpec policy;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sim::evaluate_policy(recs, policy, GoalkeeperProfile{}, UncertaintyParams{}, tables, {}).aggregate);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(recs.size()));
}
BENCHMARK(BM_EvaluateLatePolicy)->Arg(2000)->Arg(20000);

void BM_Featurize(benchmark::State& state) {
  const auto recs = dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(features::featurize(recs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Featurize)->Arg(5000);

void BM_TrainDirection(benchmark::State& state) {
  const auto recs = dataset(5000);
  const auto rows = features::featurize(recs);
  const auto set = models::direction_training_set(recs);
  std::vector<features::FeatureVector> sel;
  for (std::size_t i : set.record_index) sel.push_back(rows[i]);
  const auto x = models::to_matrix(sel);
  const models::HyperParams hp{0.1, 3, static_cast<int>(state.range(0)), 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(models::train(models::Task::multiclass_3, x, set.labels, hp));
}
BENCHMARK(BM_TrainDirection)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
