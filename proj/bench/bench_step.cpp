// Serial reference step against the OpenMP step on the same network.
// Thread count comes from OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "cmsgd/config.hpp"

using namespace cmsgd;

namespace {

struct Setup {
  ExperimentConfig cfg;
  MixingMatrix mixing;
  ObjectiveSet objectives;
  AlgorithmConfig alg;

  Setup(std::size_t n, std::size_t d) {
    cfg.n = n;
    cfg.topology.kind = TopologyKind::erdos_renyi;
    cfg.topology.er_p = 0.3;
    cfg.logistic.dimension = d;
    cfg.logistic.mean_loss = true;
    cfg.eta = 1e-4;
    cfg.T = 1u << 30;
    mixing = mixing_for(cfg);
    objectives = objectives_for(cfg);
    alg = algorithm_for(cfg, mixing);
  }
};

template <bool Parallel>
void BM_step(benchmark::State& bs) {
  const auto n = static_cast<std::size_t>(bs.range(0));
  const auto d = static_cast<std::size_t>(bs.range(1));
  Setup s(n, d);
  NetworkState state = init(s.alg, initial_point(n, d, false, 1));
  AgentStreams streams = AgentStreams::from_seed(1, n);
  for (auto _ : bs) {
    auto rec = Parallel ? step(state, s.alg, s.objectives, streams)
                        : reference::step(state, s.alg, s.objectives, streams);
    benchmark::DoNotOptimize(rec.bits);
  }
  bs.SetItemsProcessed(bs.iterations() * static_cast<std::int64_t>(n));
}

void shapes(benchmark::internal::Benchmark* b) {
  for (int n : {6, 32, 128})
    for (int d : {30, 300}) b->Args({n, d});
}

}  // namespace

BENCHMARK(BM_step<false>)->Name("reference_step")->Apply(shapes);
BENCHMARK(BM_step<true>)->Name("openmp_step")->Apply(shapes);

BENCHMARK_MAIN();
