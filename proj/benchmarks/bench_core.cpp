// Copyright 2026 The skewsim Authors. All rights reserved.
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

#include "skewsim/analysis.hpp"
#include "skewsim/harness.hpp"
#include "skewsim/models.hpp"

namespace {

using namespace skewsim;

RunConfig face_run(double skew) {
  const TaskPreset face = *builtin_task("face");
  RunConfig c;
  StreamSpec s;
  s.num_classes = face.oracle.num_classes;
  s.segments = {{skew > 0 ? 5u : 0u, skew, 1800, std::nullopt}};
  c.stream = s;
  c.oracle = face.oracle;
  c.templates = {face.compact};
  c.weg.tau_a = face.tau_a;
  c.weg.training_skew = face.training_skew;
  c.seed = 1;
  return c;
}

void BM_WindowSupportTable(benchmark::State& state) {
  const auto regimes = builtin_regimes();
  for (auto _ : state) benchmark::DoNotOptimize(window_support_table(regimes));
}
BENCHMARK(BM_WindowSupportTable);

void BM_DetectionProbability(benchmark::State& state) {
  const auto window = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(detection_probability(0.004, window, 3));
}
BENCHMARK(BM_DetectionProbability)->Arg(30)->Arg(90)->Arg(300);

void BM_Repetition(benchmark::State& state) {
  const RunConfig c = face_run(static_cast<double>(state.range(0)) / 100.0);
  for (auto _ : state) benchmark::DoNotOptimize(run_repetition(c, 0));
  state.SetItemsProcessed(state.iterations() * 1800);
}
BENCHMARK(BM_Repetition)->Arg(0)->Arg(90);

}  // namespace

BENCHMARK_MAIN();
