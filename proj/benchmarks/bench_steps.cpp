// Copyright 2026 The kmstep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "kmstep/dataset.hpp"
#include "kmstep/kmeans.hpp"
#include "kmstep/quantum_emulator.hpp"
#include "kmstep/samplers.hpp"

namespace {

using namespace kmstep;

const PlanarPreset& planar() {
  static const auto p = planar_mixture_preset(0.5, 10000, 1);
  return p;
}

void BM_LloydStep(benchmark::State& state) {
  const auto& p = planar();
  for (auto _ : state) benchmark::DoNotOptimize(lloyd_step(p.data, p.initial_centers));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.data.n()));
}
BENCHMARK(BM_LloydStep)->Unit(benchmark::kMillisecond);

void BM_MinibatchStep(benchmark::State& state) {
  const auto& p = planar();
  const auto b = static_cast<std::size_t>(state.range(0));
  Seed seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(minibatch_step(p.data, p.initial_centers, b, seed++));
}
BENCHMARK(BM_MinibatchStep)->RangeMultiplier(4)->Range(64, 16384);

void BM_DltStep(benchmark::State& state) {
  const auto& p = planar();
  const auto b = static_cast<std::size_t>(state.range(0));
  const IndexSampler sampler(p.data, SamplingScheme::row_norm_squared);
  Seed seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dlt_step(p.data, p.initial_centers, b, b, sampler, seed++));
}
BENCHMARK(BM_DltStep)->RangeMultiplier(4)->Range(64, 16384);

void BM_Diagnostics(benchmark::State& state) {
  const auto& p = planar();
  for (auto _ : state) benchmark::DoNotOptimize(diagnostics(p.data, p.initial_centers));
}
BENCHMARK(BM_Diagnostics)->Unit(benchmark::kMillisecond);

void BM_MedianTrick(benchmark::State& state) {
  const auto t = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<Vector> cand;
  for (std::size_t i = 0; i < t; ++i) {
    Vector v(8);
    for (Eigen::Index c = 0; c < v.size(); ++c) v(c) = rng.normal();
    cand.push_back(v);
  }
  for (auto _ : state) benchmark::DoNotOptimize(median_trick_index(cand));
}
BENCHMARK(BM_MedianTrick)->Arg(9)->Arg(33)->Arg(129);

void BM_QuantumStep(benchmark::State& state) {
  const auto& p = planar();
  const EmulationConfig config;
  Seed seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(quantum_kmeans_step(p.data, p.initial_centers, 0.1, 0.2, config, seed++));
}
BENCHMARK(BM_QuantumStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
