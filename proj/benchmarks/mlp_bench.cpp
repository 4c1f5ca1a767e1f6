// Copyright 2026 The logit-refine Authors. All Rights Reserved.
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

#include <random>

#include "rld/mlp.hpp"

namespace {

rld::Matrix random_batch(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  rld::Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : m.row(r)) v = normal(rng);
  }
  return m;
}

rld::MlpSpec spec_for(int which) {
  if (which == 0) return {{32, 16, 10}, rld::Activation::kReLU, 1};
  return {{32, 128, 128, 10}, rld::Activation::kReLU, 1};
}

void BM_Forward(benchmark::State& state) {
  const rld::Mlp model(spec_for(static_cast<int>(state.range(0))));
  const rld::Matrix batch = random_batch(static_cast<std::size_t>(state.range(1)), 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rld::forward_logits(model, batch));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_Forward)->ArgsProduct({{0, 1}, {64, 1000}});

void BM_ForwardBackward(benchmark::State& state) {
  const rld::Mlp model(spec_for(static_cast<int>(state.range(0))));
  const rld::Matrix batch = random_batch(64, 32);
  const rld::Matrix grads = random_batch(64, 10);
  for (auto _ : state) {
    const rld::ForwardCache cache = rld::forward(model, batch);
    benchmark::DoNotOptimize(rld::backward(model, cache, grads));
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ForwardBackward)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
