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
#ifndef REHAB_RUNTIME_PACING_HPP_
#define REHAB_RUNTIME_PACING_HPP_

#include <optional>
#include <vector>

#include "rehab/runtime/session.hpp"

namespace rehab::runtime {

enum class PacingVerdict { kAdequate, kPremature, kDelayed };

const char* to_string(PacingVerdict v);

struct PacingConfig {
  double latency_threshold_s = 3.0;
};

/// True completion time per logged step, aligned with SessionLog::steps;
/// nullopt when the patient never completed the step.
using GroundTruthTimes = std::vector<std::optional<Micros>>;

/// A detection earlier than the true completion, or any detection on a step
/// the patient never completed.
bool is_false_positive_detection(const StepRecord& s, const std::optional<Micros>& truth);

/// Premature: the step advanced before the patient finished (with no true
/// completion, only a detection-driven advance is premature). Delayed: the
/// advance lagged the true completion by more than the threshold.
/// Announce-only steps are Adequate. Throws std::invalid_argument when the
/// truth vector does not match the log.
std::vector<PacingVerdict> pacing_of(const SessionLog& log, const GroundTruthTimes& truth,
                                     const PacingConfig& config = {});

}  // namespace rehab::runtime

#endif  // REHAB_RUNTIME_PACING_HPP_
