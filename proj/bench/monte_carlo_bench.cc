//
// Copyright 2026 The classdp Authors.
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
//

// Serial vs. OpenMP delta estimation on one synthetic class pair.

#include <benchmark/benchmark.h>

#include <vector>

#include "classdp/experiments.h"
#include "classdp/privacy_analysis.h"

namespace {

using classdp::PairGeometry;

PairGeometry BenchGeometry(int k) {
  const classdp::ClassEnsemble ensemble = classdp::GenSyntheticScenario(2, k, 7);
  return classdp::ComputePairGeometry(ensemble.classes[0], ensemble.classes[1]);
}

void BM_DeltaSerial(benchmark::State& state) {
  const PairGeometry geom = BenchGeometry(static_cast<int>(state.range(1)));
  const std::vector<double> eps = classdp::LinearGrid(0.1, 1.0, 20);
  classdp::MonteCarloOptions opts;
  opts.samples = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classdp::DeltaMonteCarloSerial(geom, eps, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DeltaParallel(benchmark::State& state) {
  const PairGeometry geom = BenchGeometry(static_cast<int>(state.range(1)));
  const std::vector<double> eps = classdp::LinearGrid(0.1, 1.0, 20);
  classdp::MonteCarloOptions opts;
  opts.samples = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classdp::DeltaMonteCarlo(geom, eps, opts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_DeltaSerial)
    ->Args({100000, 2})
    ->Args({100000, 12})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeltaParallel)
    ->Args({100000, 2})
    ->Args({100000, 12})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
