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
#ifndef REHAB_DSL_SEMANTICS_HPP_
#define REHAB_DSL_SEMANTICS_HPP_

#include <vector>

#include "rehab/dsl/ast.hpp"
#include "rehab/dsl/diagnostic.hpp"

namespace rehab::dsl {

/// Checks every type invariant of a structurally parsed program. The result is
/// empty iff the program is valid.
std::vector<Diagnostic> validate_semantics(const InterventionProgram& p);

}  // namespace rehab::dsl

#endif  // REHAB_DSL_SEMANTICS_HPP_
