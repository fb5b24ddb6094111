// Permutation null: OpenMP kernel against the serial reference.
#include <benchmark/benchmark.h>

#include "seedset/graph_generate.hpp"
#include "seedset/inference.hpp"
#include "seedset/simulation.hpp"

namespace {

using namespace seedset;

struct Fixture {
  Graph g;
  HypothesisFamily family;
  DataMatrix x1, x2;

  explicit Fixture(std::size_t nodes, std::size_t cliques, std::size_t max_clique) {
    g = random_decomposable_graph({nodes, cliques, max_clique, 7});
    family = enumerate_hypotheses(g, all_decompositions(g));
    const GgmParams control = make_control(g, 11);
    x1 = sample_mvn(control, g.labels(), 100, 1);
    x2 = sample_mvn(control, g.labels(), 100, 2);
  }
};

const Fixture& fixture(int which) {
  static const Fixture small(15, 6, 4);
  static const Fixture large(100, 37, 15);
  return which == 0 ? small : large;
}

void BM_Serial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  PermutationOptions opt;
  opt.replicates = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(permutation_null_serial(f.family, f.x1, f.x2, opt));
  state.counters["hypotheses"] = static_cast<double>(f.family.size());
}

void BM_Parallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<int>(state.range(0)));
  PermutationOptions opt;
  opt.replicates = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(permutation_null(f.family, f.x1, f.x2, opt));
  state.counters["hypotheses"] = static_cast<double>(f.family.size());
}

}  // namespace

BENCHMARK(BM_Serial)->Args({0, 500})->Args({1, 100})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Args({0, 500})->Args({1, 100})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
