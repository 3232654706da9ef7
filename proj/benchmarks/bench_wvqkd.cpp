// Copyright 2026 The wvqkd Authors
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

#include "wvqkd/harness.hpp"
#include "wvqkd/protocol.hpp"
#include "wvqkd/quantum.hpp"
#include "wvqkd/rng.hpp"
#include "wvqkd/trajectory.hpp"
#include "wvqkd/weak_values.hpp"

namespace {

using namespace wvqkd;

void BM_WeakInteract(benchmark::State& state) {
  Rng rng(1);
  const PureState psi = PureState::basis_state(Basis::Z, 0);
  const Effect h = h_projector(Sign::plus, false);
  const WeakMeasurementConfig cfg{0.1, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(weak_interact(psi, h, cfg, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WeakInteract);

void BM_SimulatePhoton(benchmark::State& state) {
  Rng rng(2);
  const ChannelNoise noise{0.05, 0.03};
  const DarkCountStats dark = dark_params_with_attenuation(0.02);
  const EveModel eve{static_cast<EveKind>(state.range(0))};
  const WeakMeasurementConfig cfg{0.1, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_photon(Basis::X, 1, eve, noise, dark, cfg, rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatePhoton)->Arg(0)->Arg(1)->Arg(2);

void BM_RunProtocol(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.block_size = static_cast<std::uint64_t>(state.range(0));
  cfg.noise = {0.05, 0.03};
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunProtocol)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_Estimate(benchmark::State& state) {
  const PPSAccumulator acc = analytic_accumulator({0.05, 0.03}, 0.02, 0.1, 1.0, 10000);
  for (auto _ : state) benchmark::DoNotOptimize(estimate(acc, 0.02));
}
BENCHMARK(BM_Estimate);

void BM_WeakValueOracle(benchmark::State& state) {
  const auto pre = depolarize(DensityMatrix::from_pure(to_pure(Bb84State::zero)), 0.05);
  const auto post = depolarize(Effect::from_pure(to_pure(Bb84State::plus)), 0.03);
  const Operator2 h = h_projector(Sign::plus, false).op();
  for (auto _ : state) benchmark::DoNotOptimize(weak_value(pre, post, h));
}
BENCHMARK(BM_WeakValueOracle);

void BM_BackActionTrials(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_back_action_trials({0.1, 1.0}, 1 << 20, 3, 0));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_BackActionTrials)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
