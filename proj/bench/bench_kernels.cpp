// Serial reference against the OpenMP kernel for each parallel loop.
// The argument selects the variant: 0 = serial, 1 = parallel.

#include "veechcomb/flatgeom.hpp"
#include "veechcomb/kleinian.hpp"
#include "veechcomb/veech.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace veechcomb;

static void BM_SaddleConnections(benchmark::State& state) {
  auto s = build_double_polygon(3);
  const FieldElement bound = s.num(4);
  const bool parallel = state.range(0) == 1;
  std::size_t n = 0;
  for (auto _ : state) {
    auto all = enumerate_saddle_connections(s, bound, std::nullopt, parallel);
    n = all.size();
    benchmark::DoNotOptimize(all.data());
  }
  state.counters["connections"] = static_cast<double>(n);
  state.SetLabel(parallel ? "parallel" : "serial");
}
BENCHMARK(BM_SaddleConnections)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_KernelTraces(benchmark::State& state) {
  auto r = hecke_realization(2);
  auto k = kernel_presentation(r);
  const auto& kp = k.kernel.presentation;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> len(1, 20), gen(0, kp.rank() - 1), coin(0, 1);
  std::vector<Word> words;
  while (words.size() < 1000) {
    Word w;
    for (int i = len(rng); i > 0; --i) w.push_back({gen(rng), coin(rng) ? 1L : -1L});
    w = kp.reduce(w);
    if (!w.empty()) words.push_back(w);
  }
  const bool parallel = state.range(0) == 1;
  for (auto _ : state) {
    auto out = kernel_trace_batch(r, k, words, parallel);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(words.size()));
  state.SetLabel(parallel ? "parallel" : "serial");
}
BENCHMARK(BM_KernelTraces)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_PingPongReplay(benchmark::State& state) {
  KleinianOptions opt;
  opt.depth = 5;
  opt.samples = 100;
  opt.parallel = state.range(0) == 1;
  long words = 0;
  for (auto _ : state) {
    auto rep = kleinian_model(opt);
    words = rep.pingpong.replay.words;
    benchmark::DoNotOptimize(rep);
  }
  state.counters["words"] = static_cast<double>(words);
  state.SetLabel(opt.parallel ? "parallel" : "serial");
}
BENCHMARK(BM_PingPongReplay)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
