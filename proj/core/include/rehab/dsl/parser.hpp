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
#ifndef REHAB_DSL_PARSER_HPP_
#define REHAB_DSL_PARSER_HPP_

#include <optional>
#include <string_view>
#include <vector>

#include "rehab/dsl/ast.hpp"
#include "rehab/dsl/diagnostic.hpp"

namespace rehab::dsl {

struct ParseResult {
  std::optional<InterventionProgram> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

/// Lexes and parses without semantic checks. `program` is set when there were
/// no lexical or syntax errors, even if a nested fallback was reported.
ParseResult parse_structure(std::string_view source);

/// Full front end: structure plus validate_semantics(). `program` is set only
/// when the diagnostic list is empty.
ParseResult parse_program(std::string_view source);

/// Parses a single predicate expression, e.g. "hold(hand_at(t1, 5), 3s)".
ParseResult parse_predicate(std::string_view source, Predicate* out);

}  // namespace rehab::dsl

#endif  // REHAB_DSL_PARSER_HPP_
