/*
 *   Copyright 2026 The tabkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference against the OpenMP kernels for the heaviest loops.

#include <benchmark/benchmark.h>

#include "tabkit/medley.hpp"
#include "tabkit/models.hpp"
#include "tabkit/numkit.hpp"
#include "tabkit/parallel.hpp"

using namespace tabkit;

namespace {

struct Blobs {
  Matrix X;
  std::vector<int> y;
};

const Blobs& blobs() {
  static const Blobs b = [] {
    Rng rng(1);
    Blobs out{Matrix(2000, 8), std::vector<int>(2000)};
    for (std::size_t i = 0; i < 2000; ++i) {
      const int c = static_cast<int>(i % 3);
      out.y[i] = c;
      for (std::size_t j = 0; j < 8; ++j) out.X(i, j) = rng.normal() + (j == 0 ? 1.5 * c : 0.0);
    }
    return out;
  }();
  return b;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_ForestFit(benchmark::State& state) {
  const auto& b = blobs();
  const models::ModelSpec spec{models::ForestConfig{50, -1, 0, true, 1}, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::fit(spec, b.X, b.y, 3, exec_of(state)));
  }
  label(state);
}

void BM_KnnPredict(benchmark::State& state) {
  const auto& b = blobs();
  const models::KNearestNeighbors model({models::KnnConfig{5}, 3}, 3, b.X, b.y);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_proba(b.X, exec_of(state)));
  label(state);
}

void BM_PermutationImportance(benchmark::State& state) {
  const auto& b = blobs();
  const auto model = models::fit({models::ForestConfig{30, 8, 0, true, 1}, 3}, b.X, b.y, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(medley::permutation_importances(*model, b.X, b.y, 3, 7, exec_of(state)));
  }
  label(state);
}

void BM_DropColumnImportance(benchmark::State& state) {
  const auto& b = blobs();
  const models::ModelSpec spec{models::TreeConfig{8, 2, 0}, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        medley::drop_column_importances(spec, b.X, b.y, 3, b.X, b.y, exec_of(state)));
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_ForestFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KnnPredict)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermutationImportance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DropColumnImportance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
