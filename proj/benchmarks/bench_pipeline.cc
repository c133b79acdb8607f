// Copyright 2026 Softdec Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "softdec/decode.h"
#include "softdec/graph.h"
#include "softdec/layout.h"
#include "softdec/readout.h"
#include "softdec/rng.h"
#include "softdec/sim.h"

namespace {

using namespace softdec;

struct Fixture {
  CodeLayout layout = CodeLayout::surface13();
  ModelSet models;
  DecodingGraph graph;
  Decoder decoder;
  ClassErrorStats stats;
  SoftReweighter reweighter;

  static NoiseParams noise_for(const ModelSet& models) {
    NoiseParams n;
    n.p_meas_class = assignment_error(models.ancilla[0]);
    return n;
  }

  static ClassErrorStats stats_for(const DecodingGraph& graph, const CodeLayout& layout,
                                   const ModelSet& models) {
    ClassErrorStats s;
    for (int i = 0; i < 2000; ++i) {
      ShotRecord r = sample_shot(graph, layout, models, {}, 0, 1000000 + i, 1, false);
      accumulate_class_errors(models, r, harden_shot(models, r, layout), graph, s);
    }
    return s;
  }

  explicit Fixture(int rounds)
      : models(synthetic_model_set(layout, 4.6527)),
        graph(build_noise_floor_graph(layout, noise_for(models), rounds)),
        decoder(graph),
        stats(stats_for(graph, layout, models)),
        reweighter(models, stats, graph) {}
};

Fixture& fixture(int rounds) {
  static Fixture f4(4);
  static Fixture f16(16);
  return rounds == 4 ? f4 : f16;
}

void BM_SampleShot(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_shot(f.graph, f.layout, f.models, {}, 0, i++, 7, false));
  }
}
BENCHMARK(BM_SampleShot)->Arg(4)->Arg(16);

void BM_HardenShot(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  ShotRecord record = sample_shot(f.graph, f.layout, f.models, {}, 0, 3, 7, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(harden_shot(f.models, record, f.layout));
  }
}
BENCHMARK(BM_HardenShot)->Arg(4)->Arg(16);

void BM_HardDecode(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  std::vector<HardenedShot> shots;
  for (int i = 0; i < 64; ++i) {
    ShotRecord record = sample_shot(f.graph, f.layout, f.models, {}, 0, i, 7, false);
    shots.push_back(harden_shot(f.models, record, f.layout));
  }
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.decoder.decode(shots[i++ % shots.size()].defects));
  }
}
BENCHMARK(BM_HardDecode)->Arg(4)->Arg(16);

void BM_SoftDecode(benchmark::State& state) {
  Fixture& f = fixture(static_cast<int>(state.range(0)));
  std::vector<ShotRecord> records;
  std::vector<HardenedShot> shots;
  for (int i = 0; i < 64; ++i) {
    records.push_back(sample_shot(f.graph, f.layout, f.models, {}, 0, i, 7, false));
    shots.push_back(harden_shot(f.models, records.back(), f.layout));
  }
  size_t i = 0;
  for (auto _ : state) {
    size_t k = i++ % records.size();
    benchmark::DoNotOptimize(soft_decode(f.reweighter, records[k], shots[k], f.decoder));
  }
}
BENCHMARK(BM_SoftDecode)->Arg(4)->Arg(16);

void BM_Posterior(benchmark::State& state) {
  ReadoutModel model = make_synthetic_model("q", 4.6527);
  Rng rng(1, 2);
  IQSample z = draw_iq(model, 1, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(posterior(model, z, 2));
  }
}
BENCHMARK(BM_Posterior);

}  // namespace

BENCHMARK_MAIN();
