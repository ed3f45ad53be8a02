/*
 * SPDX-License-Identifier: Apache-2.0
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


#include <benchmark/benchmark.h>

#include <vector>

#include "icran/alignment.hpp"
#include "icran/channels.hpp"
#include "icran/rate_region.hpp"
#include "icran/waterfilling.hpp"
#include "icran/wsrm.hpp"

using namespace icran;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_IwfaSimultaneous(benchmark::State& state) {
  const int users = static_cast<int>(state.range(1));
  auto ch = gen_parallel(users, 64, 1).with_budgets(budgets_from_snr_db(users, 10.0));
  IwfaOptions o;
  o.schedule = Schedule::simultaneous;
  o.damping = 0.5;
  o.max_iter = 20;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(iwfa(ch, o).final_rates);
}
BENCHMARK(BM_IwfaSimultaneous)->ArgsProduct({{0, 1}, {8, 32}})->Unit(benchmark::kMillisecond);

void BM_Wmmse(benchmark::State& state) {
  const int users = static_cast<int>(state.range(1));
  auto ch = gen_parallel(users, 32, 2).with_budgets(budgets_from_snr_db(users, 20.0));
  WmmseOptions o;
  o.max_iter = 20;
  o.epsilon = 1e-12;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(wmmse_parallel(ch, {}, o).final_rates);
}
BENCHMARK(BM_Wmmse)->ArgsProduct({{0, 1}, {10, 20}})->Unit(benchmark::kMillisecond);

void BM_BruteForceRegion(benchmark::State& state) {
  auto ch = gen_scalar(2, 3);
  const int grid = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_region(ch, grid, exec_of(state)).size());
}
BENCHMARK(BM_BruteForceRegion)->ArgsProduct({{0, 1}, {200, 800}})->Unit(benchmark::kMillisecond);

void BM_FeasibilityNecessary(benchmark::State& state) {
  const int users = static_cast<int>(state.range(1));
  const DofProfile profile{std::vector<int>(users, 1), std::vector<AntennaPair>(users, {3, 3})};
  for (auto _ : state) benchmark::DoNotOptimize(feasibility_necessary(profile, exec_of(state)).counting);
}
BENCHMARK(BM_FeasibilityNecessary)->ArgsProduct({{0, 1}, {4, 5}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
