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
#ifndef REHAB_GENPIPE_TEMPLATE_GENERATOR_HPP_
#define REHAB_GENPIPE_TEMPLATE_GENERATOR_HPP_

#include <optional>
#include <string>

#include "rehab/dsl/ast.hpp"
#include "rehab/genpipe/prescription.hpp"

namespace rehab::genpipe {

/// Degrees added on each side of a single prescribed joint threshold.
inline constexpr double kSingleThresholdToleranceDeg = 10.0;

/// Rule-based translation of an annotated prescription into a program; this
/// is the deterministic generator backend and the "faithful" reference.
///
/// Utterances are copied verbatim. Setup steps ("Sit ...", "Prepare ..."),
/// rest steps ("Rest ...", "Relax ...") and conditional steps are
/// announce-only, as is any step without annotated entities.
dsl::InterventionProgram translate_prescription(const Prescription& rx);

/// Monitor the translator derives for one step, if any.
std::optional<dsl::Expectation> expectation_for(const PrescriptionStep& step);

/// Scene layout used by the translator: targets on a row 30 cm in front of
/// the patient, objects on a row at 50 cm, joints as referenced.
std::vector<dsl::SceneDecl> layout_scene(const Prescription& rx);

std::string generate_template_program(const Prescription& rx);

}  // namespace rehab::genpipe

#endif  // REHAB_GENPIPE_TEMPLATE_GENERATOR_HPP_
