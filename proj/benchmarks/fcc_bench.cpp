// Copyright 2026 The FCC Lab Authors
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

#include "fcc/embedding.hpp"
#include "fcc/formula.hpp"
#include "fcc/model.hpp"
#include "fcc/patterns.hpp"
#include "fcc/sampler.hpp"
#include "fcc/trainer.hpp"

namespace {

using namespace fcc;

void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const MlpModel m = init_model({n, n, 1}, EmbeddingKind::kIdentity, 1);
  const Formula f = random_dnf(n, n / 4, 4, 0, 2);
  const Dataset d = sample_dnf4(f, 256, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(m, d.input(i)));
    i = (i + 1) % d.size();
  }
}
BENCHMARK(BM_Forward)->Arg(16)->Arg(32)->Arg(128);

void BM_TrainEpoch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Formula f = random_dnf(n, n / 4, 4, 0, 2);
  const Dataset d = sample_dnf4(f, 5000, 3);
  TrainConfig tc;
  tc.max_epochs = 1;
  tc.patience = 0;
  for (auto _ : state) {
    MlpModel m = init_model({n, n, 1}, EmbeddingKind::kIdentity, 1);
    train(m, d, tc);
    benchmark::DoNotOptimize(m.w1.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Census(benchmark::State& state) {
  const auto j = static_cast<std::size_t>(state.range(0));
  const MlpModel m = init_model({32, j, 1}, EmbeddingKind::kIdentity, 1);
  const Formula f = random_dnf(32, 32, 4, 0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(count_patterns(m, f));
}
BENCHMARK(BM_Census)->Arg(32)->Arg(64);

void BM_RandomBaseline(benchmark::State& state) {
  const Formula f = random_dnf(32, 8, 4, 0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(random_baseline(32, 32, 0.6, 0.5, 0.5, f, 10, 4));
}
BENCHMARK(BM_RandomBaseline);

void BM_Hadamard(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hadamard_matrix(n));
}
BENCHMARK(BM_Hadamard)->Arg(16)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
