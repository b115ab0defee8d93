#include <benchmark/benchmark.h>

#include "battrae/gradcheck.hpp"

namespace {

using namespace battrae;

struct Fixture {
  Hyperparams hp;
  ModelParams model;
  std::vector<TrainingInstance> instances;

  Fixture(int dim, int vocab, int pairs, int max_len) {
    Rng rng(7);
    hp.dim_source = hp.dim_target = hp.dim_attention = hp.dim_semantic = dim;
    model = init_model(hp, vocab, vocab, nullptr, nullptr, rng);
    for (int i = 0; i < pairs; ++i) {
      PhrasePair pair;
      auto draw = [&](std::vector<int>& side) {
        side.resize(1 + rng.below(max_len));
        for (int& t : side) t = static_cast<int>(rng.below(vocab));
      };
      draw(pair.source);
      draw(pair.target);
      instances.push_back(sample_negatives(pair, vocab, vocab, rng));
    }
  }
};

void BM_BuildTree(benchmark::State& state) {
  Fixture fx(50, 200, 1, 8);
  std::vector<int> tokens(static_cast<std::size_t>(state.range(0)));
  Rng rng(3);
  for (int& t : tokens) t = static_cast<int>(rng.below(200));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_tree(tokens, fx.model.embed_source, fx.model.rae_source));
  }
}
BENCHMARK(BM_BuildTree)->Arg(4)->Arg(8);

void BM_ScorePair(benchmark::State& state) {
  Fixture fx(50, 200, 8, 6);
  for (auto _ : state) {
    for (const auto& inst : fx.instances) {
      benchmark::DoNotOptimize(score_pair(inst.positive, fx.model));
    }
  }
}
BENCHMARK(BM_ScorePair);

void BM_ObjectiveAndGradient(benchmark::State& state) {
  Fixture fx(16, 80, 32, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        objective_and_gradient(fx.instances, fx.model, fx.hp,
                               static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_ObjectiveAndGradient)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
