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
#ifndef REHAB_GENPIPE_MUTATE_HPP_
#define REHAB_GENPIPE_MUTATE_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "rehab/dsl/ast.hpp"
#include "rehab/genpipe/prescription.hpp"

namespace rehab::genpipe {

enum class MutationKind { kOmit, kDuplicate, kSubstitute, kReorder, kHallucinateAtom };

const char* to_string(MutationKind k);
MutationKind mutation_kind_from_string(const std::string& s);

/// Ground truth of one injected defect.
struct MutationLabel {
  MutationKind kind = MutationKind::kOmit;
  std::string program;
  int step = 0;          // index in the original program (1-based)
  int program_step = 0;  // index of the affected step in the mutated program; 0 for omit
  std::string text;      // original utterance of the affected step
  std::string detail;    // substituted text, moved-to position or injected joint
  std::uint64_t seed = 0;

  /// Identity without the seed.
  std::string key() const;
};

struct Mutation {
  dsl::InterventionProgram program;
  MutationLabel label;
};

class MutationImpossible : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic per seed. Omit, substitute and reorder pick steps whose
/// utterance is unique in the program so the defect is unambiguous.
/// hallucinate-atom conjoins joint_angle(j, 10, 40) for a joint absent from
/// the program and, when given, from the prescription vocabulary.
Mutation mutate_program(const dsl::InterventionProgram& p, MutationKind kind, std::uint64_t seed,
                        const Prescription* rx = nullptr);

nlohmann::json label_to_json(const MutationLabel& l);

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_MUTATE_HPP_
