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
#ifndef REHAB_GENPIPE_FIDELITY_HPP_
#define REHAB_GENPIPE_FIDELITY_HPP_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rehab/dsl/ast.hpp"
#include "rehab/genpipe/prescription.hpp"

namespace rehab::genpipe {

enum class StepVerdict { kMatch, kOmitted, kExtraneous, kSubstituted, kReordered };

const char* to_string(StepVerdict v);

/// Minimum normalized similarity for an unmatched pair to count as Substituted.
inline constexpr double kSubstitutionSimilarity = 0.85;

/// One alignment entry. Indices are 1-based; `rx_index` is absent for
/// Extraneous, `program_index` for Omitted.
struct AlignedStep {
  StepVerdict verdict = StepVerdict::kMatch;
  std::optional<int> rx_index;
  std::optional<int> program_index;
  double similarity = 1.0;
  int edit_distance = 0;
};

struct FidelityReport {
  std::vector<AlignedStep> steps;
  bool correct = false;
  bool complete = false;

  std::vector<AlignedStep> mismatches() const;
};

FidelityReport validate_fidelity(const std::vector<std::string>& rx_texts,
                                 const std::vector<std::string>& program_utterances);
FidelityReport validate_fidelity(const Prescription& rx, const dsl::InterventionProgram& p);

nlohmann::json fidelity_to_json(const FidelityReport& r);

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_FIDELITY_HPP_
