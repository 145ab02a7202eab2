/* Copyright 2026 The Rehab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <benchmark/benchmark.h>

#include "rehab/dsl/parser.hpp"
#include "rehab/experiments/batch.hpp"
#include "rehab/genpipe/template_generator.hpp"
#include "rehab/retrofit/corpus.hpp"
#include "rehab/retrofit/retrofit.hpp"
#include "rehab/sim/simulator.hpp"
#include "rehab/stats/fisher.hpp"
#include "rehab/stats/wilson.hpp"

namespace {

using namespace rehab;

const std::vector<genpipe::Prescription>& worksheets() {
  static const auto ws = experiments::load_worksheets(std::string(REHAB_DEFAULT_DATA_DIR) + "/worksheets");
  return ws;
}

void BM_ParseProgram(benchmark::State& state) {
  const auto text = genpipe::generate_template_program(worksheets().at(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(dsl::parse_program(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseProgram)->DenseRange(0, 9, 3);

void BM_FisherExact(benchmark::State& state) {
  const auto n = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(stats::fisher_exact_2x2(n, 0, n * 55 / 100, n - n * 55 / 100));
}
BENCHMARK(BM_FisherExact)->Arg(40)->Arg(400)->Arg(4000);

void BM_Wilson(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stats::wilson_interval(352, 398, 0.95));
}
BENCHMARK(BM_Wilson);

void BM_SimulateSession(benchmark::State& state) {
  const auto& rx = worksheets().front();
  const auto program = *dsl::parse_program(genpipe::generate_template_program(rx)).program;
  sim::BehaviorScript script;
  for (std::size_t i = 0; i < program.steps.size(); ++i) {
    if (program.steps[i].monitored()) script.steps[static_cast<int>(i) + 1] = sim::Behavior::complete_at(4);
  }
  const sim::NoiseModel noise{state.range(0) ? 1e-3 : 0, 0, 0, 11};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::simulate(program, sim::standardized_patient(), script, noise));
  }
}
BENCHMARK(BM_SimulateSession)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RetrofitCorpus(benchmark::State& state) {
  const std::string data = REHAB_DEFAULT_DATA_DIR;
  const auto corpus = retrofit::load_corpus(data + "/corpus", data + "/templates");
  for (auto _ : state) benchmark::DoNotOptimize(retrofit::evaluate_corpus(corpus));
}
BENCHMARK(BM_RetrofitCorpus)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
