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
#ifndef REHAB_GENPIPE_HALLUCINATION_HPP_
#define REHAB_GENPIPE_HALLUCINATION_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/dsl/ast.hpp"
#include "rehab/genpipe/prescription.hpp"

namespace rehab::genpipe {

enum class HallucinationReason {
  kUnprescribedJoint,
  kUnprescribedObject,
  kUnprescribedTarget,
  kUnprescribedThreshold,
};

const char* to_string(HallucinationReason r);

/// Relative tolerance around a prescribed threshold.
inline constexpr double kThresholdTolerance = 0.10;

struct HallucinationFinding {
  int step_index = 0;
  dsl::Atom atom;
  std::string symbol;  // entity id or printed threshold
  HallucinationReason reason = HallucinationReason::kUnprescribedJoint;
  bool fallback = false;  // found in the step's fallback monitor
};

/// Checks every monitor atom against the prescription vocabulary (step
/// annotations united with the program-wide ones). Numeric parameters pass
/// when within 10% of a prescribed threshold of the matching unit or when
/// they equal a value the API library derives by default. Each atom yields
/// at most one finding; an unknown symbol takes precedence over thresholds.
std::vector<HallucinationFinding> detect_hallucinated_monitors(const Prescription& rx,
                                                               const dsl::InterventionProgram& p);

nlohmann::json finding_to_json(const HallucinationFinding& f);

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_HALLUCINATION_HPP_
