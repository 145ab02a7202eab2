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
#ifndef REHAB_EXPERIMENTS_BATCH_HPP_
#define REHAB_EXPERIMENTS_BATCH_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/dsl/ast.hpp"
#include "rehab/genpipe/hallucination.hpp"
#include "rehab/genpipe/prescription.hpp"
#include "rehab/runtime/pacing.hpp"
#include "rehab/sim/prelabel.hpp"
#include "rehab/sim/profile.hpp"
#include "rehab/sim/simulator.hpp"
#include "rehab/stats/confusion.hpp"
#include "rehab/stats/report.hpp"

namespace rehab::experiments {

struct BatchConfig {
  int monitored_steps = 398;
  double incomplete_fraction = 0.363;
  int hallucinated_steps = 0;
  double fp_rate = 0;
  double fn_rate = 0;
  double dropout_rate = 0;
  std::uint64_t seed = 0;
  double hz = 10;
  double poll_hz = 10;
  sim::PatientProfile profile = sim::standardized_patient();
  runtime::PacingConfig pacing;
  double gamma = 0.95;
};

struct BatchSession {
  std::string id;
  genpipe::Prescription rx;
  dsl::InterventionProgram program;
  sim::BehaviorScript script;
  std::uint64_t noise_seed = 0;
  std::vector<int> seeded_steps;  // steps carrying an injected hallucinated atom
  std::vector<genpipe::HallucinationFinding> findings;
  sim::SimulationResult result;
};

/// (session id, step index)
using StepRef = std::pair<std::string, int>;

struct BatchResult {
  BatchConfig config;
  std::vector<BatchSession> sessions;
  std::vector<stats::PreLabel> labels;
  stats::ConfusionMatrix matrix;
  std::vector<runtime::PacingVerdict> pacing;  // monitored steps, batch order
  std::int64_t false_positive_detections = 0;
  std::set<StepRef> seeded;
  std::set<StepRef> flagged;
  stats::EvalReport report;
  sim::NoiseStats noise;
};

/// Sessions cycle through `worksheets` in order until the requested number of
/// monitored steps is reached; the last session is cut after its final
/// needed monitored step. Programs come from the deterministic generator.
/// Labels follow make_prelabel_mix over the whole batch. Hallucinated atoms
/// are injected into distinct monitored steps chosen by the seed.
BatchResult run_batch(const std::vector<genpipe::Prescription>& worksheets, const BatchConfig& config);

/// Appends joint_angle(joint, 10, 40) to the step's monitor and declares the
/// joint. The joint is the first canonical one absent from the program and
/// the prescription whose range of motion under `profile` admits the band.
std::string inject_hallucinated_atom(dsl::InterventionProgram& p, const genpipe::Prescription& rx,
                                     int step_index, const sim::PatientProfile& profile);

/// Worksheet prescriptions (goal01.json ... goal10.json) from a directory.
std::vector<genpipe::Prescription> load_worksheets(const std::string& dir);

nlohmann::json batch_summary_to_json(const BatchResult& r);

}  // namespace rehab::experiments

#endif  // REHAB_EXPERIMENTS_BATCH_HPP_
