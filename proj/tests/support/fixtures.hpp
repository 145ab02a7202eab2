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
// Shared helpers for the unit tests and the acceptance binary.
#ifndef REHAB_TESTS_SUPPORT_FIXTURES_HPP_
#define REHAB_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rehab/common/rng.hpp"
#include "rehab/dsl/ast.hpp"
#include "rehab/genpipe/prescription.hpp"
#include "rehab/sim/profile.hpp"

namespace rehab::testing {

inline std::string data_dir() { return REHAB_TEST_DATA_DIR; }
inline std::string data_path(const std::string& rel) { return data_dir() + "/" + rel; }

/// Fresh, empty scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::vector<genpipe::Prescription> worksheets();
const genpipe::Prescription& worksheet(int goal);

/// Program from the deterministic generator, parsed and validated.
dsl::InterventionProgram faithful_program(const genpipe::Prescription& rx);

/// Every monitored step completes `offset_s` after its announcement.
sim::BehaviorScript complete_all(const dsl::InterventionProgram& p, double offset_s);

/// Random valid program: declared ids, canonical joints, contiguous steps,
/// predicate depth within limits, holds shorter than their timeout.
dsl::InterventionProgram random_program(Rng& rng);

/// Random script over the monitored steps of `p` mixing all behavior kinds.
sim::BehaviorScript random_script(const dsl::InterventionProgram& p, Rng& rng);

}  // namespace rehab::testing

#endif  // REHAB_TESTS_SUPPORT_FIXTURES_HPP_
