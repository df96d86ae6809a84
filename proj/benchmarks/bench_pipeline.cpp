// Microbenchmarks for the online path: attention scoring, MDHV assembly,
// and end-to-end inference at several NB settings (the Fig.-8-style split:
// RTEC-only vs GCN-only vs full pipeline).

#include <benchmark/benchmark.h>

#include "gate/gcn.hpp"
#include "gate/graph.hpp"
#include "gate/harness.hpp"
#include "gate/rtec.hpp"
#include "gate/simulator.hpp"

namespace {

struct Pipeline {
  gate::Scenario sc;
  gate::Dataset train;
  gate::FingerprintGraph graph;
  gate::GcnModel model;
  gate::QueryFingerprint query;

  Pipeline(double nb_percent, int epochs) {
    gate::ScenarioSpec spec = gate::preset_spec("hetero");
    sc = gate::generate_scenario(spec, 7);
    train = gate::generate_dataset(sc, 5, {"d0"}, gate::SplitTag::train);
    gate::ModelConfig cfg;
    cfg.nb_percent = nb_percent;
    cfg.epochs = epochs;
    graph = gate::build_gate_graph(train, cfg);
    auto [m, rep] = gate::train_on_graph(train, graph, cfg);
    model = std::move(m);
    gate::Dataset test =
        gate::generate_dataset(sc, 1, {"d1"}, gate::SplitTag::test);
    query = {test.samples[3].fingerprint, "d1"};
  }
};

Pipeline& pipeline(double nb) {
  static Pipeline p10(10.0, 30);
  static Pipeline p50(50.0, 30);
  return nb < 30.0 ? p10 : p50;
}

void BM_AttentionScore(benchmark::State& state) {
  auto& p = pipeline(10.0);
  gate::NormalizedFingerprint a = p.graph.node_feature(0);
  gate::NormalizedFingerprint b = p.graph.node_feature(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate::attention_score(a, b));
  }
}
BENCHMARK(BM_AttentionScore);

void BM_RtecAttach(benchmark::State& state) {
  auto& p = pipeline(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate::attach_and_score(p.query, p.graph));
  }
}
BENCHMARK(BM_RtecAttach)->Arg(10)->Arg(50);

void BM_MdhvAssembly(benchmark::State& state) {
  auto& p = pipeline(static_cast<double>(state.range(0)));
  Eigen::VectorXd q = gate::normalize(p.query.fingerprint).values;
  auto selected = gate::attach_and_score(p.query, p.graph);
  int k = p.model.config.k_nb(p.graph.n_rps());
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate::assemble_sample_mdhv(
        q, selected, p.graph.node_features, k, gate::Ablation::full));
  }
}
BENCHMARK(BM_MdhvAssembly)->Arg(10)->Arg(50);

void BM_GcnForward(benchmark::State& state) {
  auto& p = pipeline(static_cast<double>(state.range(0)));
  Eigen::VectorXd q = gate::normalize(p.query.fingerprint).values;
  auto selected = gate::attach_and_score(p.query, p.graph);
  int k = p.model.config.k_nb(p.graph.n_rps());
  gate::Mdhv mdhv = gate::assemble_sample_mdhv(
      q, selected, p.graph.node_features, k, gate::Ablation::full);
  mdhv.m *= gate::kMdhvInputScale;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate::forward(p.model, mdhv));
  }
}
BENCHMARK(BM_GcnForward)->Arg(10)->Arg(50);

void BM_EndToEndInfer(benchmark::State& state) {
  auto& p = pipeline(static_cast<double>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gate::infer(p.query, p.graph, p.model));
  }
}
BENCHMARK(BM_EndToEndInfer)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
