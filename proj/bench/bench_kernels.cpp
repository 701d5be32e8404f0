/*
 * Copyright 2026 The cdcache Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Class-enumerating OpenMP kernels against the serial reference, plus the
// simulator and converse kernels. The second argument is the thread count.

#include "cdc/converse.hpp"
#include "cdc/reference.hpp"
#include "cdc/simulator.hpp"
#include "cdc/smooth_opt.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace cdc;

namespace {

// N files of sizes 3, 2.5, ...; one tier of K users.
struct Setup {
  SystemInstance instance;
  TierLayout layout;
  CachingParameter q;
};

Setup make_setup(int n_files, int users) {
  ArithmeticScenario s;
  s.n_files = n_files;
  s.first_file_size = 3.0;
  s.file_size_step = -2.0 / n_files;
  s.first_cache_size = 1.5;
  s.zipf_gamma = 0.8;
  s.tier_user_counts = {users};
  SystemInstance inst = build_arithmetic_scenario(s);
  TierLayout layout({users});
  CachingParameter q = random_feasible_start(inst, 1, 0);
  return {inst, layout, q};
}

void BM_WorstCaseKernel(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 4);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_load(s.instance, s.layout, s.q));
}

void BM_WorstCaseReference(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(reference::worst_case_load(s.instance, s.layout, s.q));
}

void BM_AverageKernel(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 4);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(average_load(s.instance, s.layout, s.q));
}

void BM_AverageReference(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(reference::average_load(s.instance, s.layout, s.q));
}

void BM_SmoothedGradient(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 4);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        smoothed_value_and_gradient(LoadKind::worst_case, s.instance, s.layout, s.q, 1.0).value);
}

void BM_SmoothedReference(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::smoothed_worst_case(s.instance, s.layout, s.q, 1.0));
}

void BM_Placement(benchmark::State& state) {
  const Setup s = make_setup(4, 4);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const PlacementState p = place(s.instance, s.layout, s.q, state.range(0), ++seed);
    benchmark::DoNotOptimize(deliver(p, {0, 1, 2, 3}).total_units);
  }
}

void BM_ConverseAverage(benchmark::State& state) {
  const Setup s = make_setup(static_cast<int>(state.range(0)), 20);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(converse_average(s.instance, s.layout).value);
}

}  // namespace

BENCHMARK(BM_WorstCaseKernel)->ArgsProduct({{3, 5, 7}, {1, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WorstCaseReference)->Args({3, 1})->Args({5, 1})->Args({7, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AverageKernel)->ArgsProduct({{3, 5, 7}, {1, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AverageReference)->Args({3, 1})->Args({5, 1})->Args({7, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothedGradient)->ArgsProduct({{3, 5, 7}, {1, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothedReference)->Args({3, 1})->Args({5, 1})->Args({7, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Placement)->ArgsProduct({{1000, 10000}, {1, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConverseAverage)->ArgsProduct({{6, 50}, {1, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
