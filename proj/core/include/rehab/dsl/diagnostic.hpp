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
#ifndef REHAB_DSL_DIAGNOSTIC_HPP_
#define REHAB_DSL_DIAGNOSTIC_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rehab/dsl/ast.hpp"

namespace rehab::dsl {

enum class DiagnosticKind { kLexical, kSyntax, kSemantic };

/// One problem found in a program. `rule` is a stable upper-snake identifier
/// (e.g. "UNDECLARED_ID") that tests and clients can match on.
struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::kSemantic;
  std::string rule;
  std::string message;
  SourceSpan span;
  std::optional<int> step_index;

  SourceLoc loc() const { return span.loc; }
};

std::ostream& operator<<(std::ostream& os, const Diagnostic& d);
std::string format_diagnostics(const std::vector<Diagnostic>& diags);

namespace rules {
inline constexpr const char* kLexError = "LEX_ERROR";
inline constexpr const char* kSyntaxError = "SYNTAX_ERROR";
inline constexpr const char* kNoSteps = "NO_STEPS";
inline constexpr const char* kNoncontiguousSteps = "NONCONTIGUOUS_STEPS";
inline constexpr const char* kDuplicateId = "DUPLICATE_ID";
inline constexpr const char* kUnknownJoint = "UNKNOWN_JOINT";
inline constexpr const char* kJointPosition = "JOINT_POSITION";
inline constexpr const char* kUndeclaredId = "UNDECLARED_ID";
inline constexpr const char* kKindMismatch = "KIND_MISMATCH";
inline constexpr const char* kEmptyUtterance = "EMPTY_UTTERANCE";
inline constexpr const char* kBadTimeout = "BAD_TIMEOUT";
inline constexpr const char* kHoldExceedsTimeout = "HOLD_EXCEEDS_TIMEOUT";
inline constexpr const char* kBadHold = "BAD_HOLD_DURATION";
inline constexpr const char* kBadCount = "BAD_COUNT";
inline constexpr const char* kDepthExceeded = "DEPTH_EXCEEDED";
inline constexpr const char* kBadAngleRange = "BAD_ANGLE_RANGE";
inline constexpr const char* kBadRadius = "BAD_RADIUS";
inline constexpr const char* kBadRestDuration = "BAD_REST_DURATION";
inline constexpr const char* kNestedFallback = "NESTED_FALLBACK";
inline constexpr const char* kFallbackWithoutExpect = "FALLBACK_WITHOUT_EXPECT";
inline constexpr const char* kEmptyComposite = "EMPTY_COMPOSITE";
}  // namespace rules

inline constexpr int kMaxPredicateDepth = 4;

}  // namespace rehab::dsl

#endif  // REHAB_DSL_DIAGNOSTIC_HPP_
