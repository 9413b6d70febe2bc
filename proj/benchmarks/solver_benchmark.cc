// Copyright 2026 The fedrelay Authors
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

#include "fedrelay/radio.h"
#include "fedrelay/routing.h"
#include "fedrelay/scenario.h"
#include "fedrelay/upper_level.h"

namespace {

using namespace fedrelay;

// Preset with a smaller update so relaying is in play.
Scenario relay_preset() {
  Scenario s = paper_preset(7);
  s.I_d = 1e-4;
  return s;
}

SolverConfig no_order_check() {
  SolverConfig cfg;
  cfg.order_check = false;
  return cfg;
}

void BM_TransmissionRates(benchmark::State& state) {
  const Scenario s = paper_preset(7);
  const auto H = build_channel_matrix(s);
  PowerAssignment a;
  for (std::size_t i = 0; i < s.num_devices(); ++i) a.links.push_back({s.num_devices(), 1.0});
  const Matrix P = a.matrix();
  for (auto _ : state) benchmark::DoNotOptimize(transmission_rates(P, H, s));
}
BENCHMARK(BM_TransmissionRates);

void BM_AbsorbingReach(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RoutingPlan chain;
  for (std::size_t i = 0; i < n; ++i) chain.next_hop.push_back(i + 1);
  const IndicatorMatrix I = indicator_from_plan(chain);
  for (auto _ : state) benchmark::DoNotOptimize(check_acyclic_reach(I));
}
BENCHMARK(BM_AbsorbingReach)->Arg(9)->Arg(32);

void BM_RelayBestResponse(benchmark::State& state) {
  const Game game(relay_preset());
  const auto cfg = no_order_check();
  const StrategyProfile start = game.default_initial_profile();
  for (auto _ : state) {
    benchmark::DoNotOptimize(game.relay_power_best_response(0, start, 1e8, cfg));
  }
}
BENCHMARK(BM_RelayBestResponse);

void BM_DynamicsPreset(benchmark::State& state) {
  const Game game(paper_preset(7));
  const auto cfg = no_order_check();
  for (auto _ : state) benchmark::DoNotOptimize(game.best_response_dynamics(cfg));
}
BENCHMARK(BM_DynamicsPreset)->Unit(benchmark::kMillisecond);

void BM_DynamicsRelayPreset(benchmark::State& state) {
  const Game game(relay_preset());
  const auto cfg = no_order_check();
  for (auto _ : state) benchmark::DoNotOptimize(game.best_response_dynamics(cfg));
}
BENCHMARK(BM_DynamicsRelayPreset)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
