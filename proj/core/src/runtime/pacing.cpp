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
#include "rehab/runtime/pacing.hpp"

#include <stdexcept>

namespace rehab::runtime {

const char* to_string(PacingVerdict v) {
  switch (v) {
    case PacingVerdict::kAdequate: return "Adequate";
    case PacingVerdict::kPremature: return "Premature";
    case PacingVerdict::kDelayed: return "Delayed";
  }
  return "?";
}

bool is_false_positive_detection(const StepRecord& s, const std::optional<Micros>& truth) {
  const auto det = s.advancing_detection();
  if (!det) return false;
  return !truth || *det < *truth;
}

std::vector<PacingVerdict> pacing_of(const SessionLog& log, const GroundTruthTimes& truth,
                                     const PacingConfig& config) {
  if (truth.size() != log.steps.size()) {
    throw std::invalid_argument("pacing_of: ground truth does not match the session log");
  }
  const Micros threshold = from_seconds(config.latency_threshold_s);
  std::vector<PacingVerdict> out;
  out.reserve(log.steps.size());
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    const StepRecord& s = log.steps[i];
    PacingVerdict v = PacingVerdict::kAdequate;
    if (s.monitored) {
      if (truth[i]) {
        if (s.advanced_at < *truth[i]) {
          v = PacingVerdict::kPremature;
        } else if (s.advanced_at - *truth[i] > threshold) {
          v = PacingVerdict::kDelayed;
        }
      } else if (s.advancing_detection()) {
        v = PacingVerdict::kPremature;
      }
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace rehab::runtime
