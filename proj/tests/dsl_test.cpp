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
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "rehab/dsl/json_codec.hpp"
#include "rehab/dsl/parser.hpp"
#include "rehab/dsl/printer.hpp"
#include "rehab/dsl/semantics.hpp"
#include "rehab/genpipe/template_generator.hpp"
#include "support/fixtures.hpp"

namespace rehab::dsl {
namespace {

using testing::data_path;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_rule(const std::vector<Diagnostic>& ds, const std::string& rule) {
  for (const auto& d : ds) {
    if (d.rule == rule) return true;
  }
  return false;
}

TEST(Parser, MinimalProgramIsOneAnnounceOnlyStep) {
  const auto r = parse_program("program \"p\"\nscene target t1 at (0,0,0)\nstep 1: say \"Rest.\" ");
  ASSERT_TRUE(r.ok()) << format_diagnostics(r.diagnostics);
  ASSERT_EQ(r.program->steps.size(), 1u);
  EXPECT_FALSE(r.program->steps[0].monitored());
  EXPECT_EQ(r.program->steps[0].utterance, "Rest.");
}

TEST(Parser, GoalOneGoldenHasElevenStepsAndThreeTargets) {
  const auto r = parse_program(slurp(data_path("goal01.dsl")));
  ASSERT_TRUE(r.ok()) << format_diagnostics(r.diagnostics);
  EXPECT_EQ(r.program->steps.size(), 11u);
  int targets = 0;
  for (const auto& d : r.program->scene) targets += d.kind == SceneKind::kTarget;
  EXPECT_EQ(targets, 3);
}

TEST(Parser, UndeclaredIdentifierNamesIdAndStep) {
  const auto r = parse_program(
      "program \"p\"\nscene object red_cube at (0, 0, 0)\n"
      "step 1: say \"Sit.\"\n"
      "step 2: say \"Pick up the green cube.\"\n  expect within 20s: grasp(green_cube)\n");
  EXPECT_FALSE(r.ok());
  ASSERT_TRUE(has_rule(r.diagnostics, rules::kUndeclaredId));
  for (const auto& d : r.diagnostics) {
    if (d.rule != rules::kUndeclaredId) continue;
    EXPECT_NE(d.message.find("green_cube"), std::string::npos);
    ASSERT_TRUE(d.step_index.has_value());
    EXPECT_EQ(*d.step_index, 2);
  }
}

TEST(Parser, LexicalErrorCarriesLocation) {
  const auto r = parse_program("program \"p\"\nstep 1: say \"ok\" $\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics.front().loc().line, 2);
}

TEST(Parser, ReportsSeveralErrorsInOnePass) {
  const auto r = parse_program(
      "program \"p\"\nstep 1: say \n"
      "step 2: say \"ok\"\n  expect within 20s: hand_at(\n"
      "step 3: say \"fine\"\n");
  EXPECT_GE(r.diagnostics.size(), 2u);
}

TEST(Printer, OneStepProgramEndsWithNewline) {
  InterventionProgram p;
  p.name = "p";
  p.steps.push_back({1, "Rest.", std::nullopt, std::nullopt, {}});
  const auto text = print_program(p);
  EXPECT_EQ(text, "program \"p\"\n\nstep 1: say \"Rest.\"\n");
  EXPECT_EQ(text.back(), '\n');
}

TEST(Printer, HoldOverHandAt) {
  EXPECT_EQ(print_predicate(HoldFor{HandAt{"t1", 5}, 3}), "hold(hand_at(t1, 5), 3s)");
}

TEST(Printer, GoalOneMatchesGolden) {
  EXPECT_EQ(genpipe::generate_template_program(testing::worksheet(1)), slurp(data_path("goal01.dsl")));
}

TEST(Printer, NumbersAndQuotes) {
  EXPECT_EQ(format_number(5), "5");
  EXPECT_EQ(format_number(2.54), "2.54");
  EXPECT_EQ(format_number(-0.5), "-0.5");
  EXPECT_EQ(quote("a \"b\"\n\\"), "\"a \\\"b\\\"\\n\\\\\"");
}

TEST(Semantics, HoldLongerThanTimeout) {
  const auto r = parse_program(
      "program \"p\"\nscene target t1 at (0, 0, 0)\n"
      "step 1: say \"Hold.\"\n  expect within 20s: hold(hand_at(t1, 5), 30s)\n");
  EXPECT_TRUE(has_rule(r.diagnostics, rules::kHoldExceedsTimeout));
}

TEST(Semantics, NoncontiguousSteps) {
  const auto r = parse_program(
      "program \"p\"\nstep 1: say \"a\"\nstep 2: say \"b\"\nstep 4: say \"c\"\n");
  EXPECT_TRUE(has_rule(r.diagnostics, rules::kNoncontiguousSteps));
}

TEST(Semantics, CleanWorksheetProgramsHaveNoDiagnostics) {
  for (const auto& rx : testing::worksheets()) {
    const auto r = parse_structure(genpipe::generate_template_program(rx));
    ASSERT_TRUE(r.program.has_value()) << rx.id;
    EXPECT_TRUE(validate_semantics(*r.program).empty()) << rx.id;
  }
}

struct RuleCase {
  const char* rule;
  const char* body;
};

class SemanticRule : public ::testing::TestWithParam<RuleCase> {};

TEST_P(SemanticRule, IsReported) {
  const std::string src = std::string("program \"p\"\nscene target t1 at (0, 0, 0)\nscene object cube at (1, 1, 0)\n"
                                      "scene joint right_elbow_flexion\n") + GetParam().body;
  const auto r = parse_program(src);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(has_rule(r.diagnostics, GetParam().rule)) << format_diagnostics(r.diagnostics);
}

INSTANTIATE_TEST_SUITE_P(
    Rules, SemanticRule,
    ::testing::Values(
        RuleCase{rules::kDuplicateId, "scene target t1 at (2, 2, 0)\nstep 1: say \"a\"\n"},
        RuleCase{rules::kUnknownJoint, "scene joint right_knee\nstep 1: say \"a\"\n"},
        RuleCase{rules::kKindMismatch, "step 1: say \"a\"\n  expect within 5s: grasp(t1)\n"},
        RuleCase{rules::kEmptyUtterance, "step 1: say \"\"\n"},
        RuleCase{rules::kBadTimeout, "step 1: say \"a\"\n  expect within 0s: hand_at(t1, 5)\n"},
        RuleCase{rules::kBadCount, "step 1: say \"a\"\n  expect within 5s: count(grasp(cube), 0)\n"},
        RuleCase{rules::kBadAngleRange,
                 "step 1: say \"a\"\n  expect within 5s: joint_angle(right_elbow_flexion, 120, 80)\n"},
        RuleCase{rules::kBadRadius, "step 1: say \"a\"\n  expect within 5s: hand_at(t1, 0)\n"},
        RuleCase{rules::kBadRestDuration, "step 1: say \"a\"\n  expect within 5s: rest(right_elbow_flexion, 0s)\n"},
        RuleCase{rules::kDepthExceeded,
                 "step 1: say \"a\"\n  expect within 5s: all(any(all(any(hand_at(t1, 5)))))\n"},
        RuleCase{rules::kNestedFallback,
                 "step 1: say \"a\"\n  expect within 5s: hand_at(t1, 5)\n  on timeout: say \"b\"\n"
                 "    expect within 5s: hand_at(t1, 5)\n  on timeout: say \"c\"\n    expect within 5s: hand_at(t1, 5)\n"},
        RuleCase{rules::kFallbackWithoutExpect, "step 1: say \"a\"\n  on timeout: say \"b\"\n    expect within 5s: hand_at(t1, 5)\n"},
        RuleCase{rules::kNoSteps, ""}));

TEST(Property, ParsePrintRoundTripOverGeneratedAsts) {
  Rng rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    const auto p = testing::random_program(rng);
    ASSERT_TRUE(validate_semantics(p).empty()) << format_diagnostics(validate_semantics(p));
    const auto text = print_program(p);
    const auto r = parse_program(text);
    ASSERT_TRUE(r.ok()) << text << format_diagnostics(r.diagnostics);
    ASSERT_EQ(*r.program, p) << text;
    ASSERT_EQ(print_program(*r.program), text);
  }
}

TEST(Property, JsonRoundTripOverGeneratedAsts) {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const auto p = testing::random_program(rng);
    ASSERT_EQ(program_from_json(program_to_json(p)), p);
  }
}

TEST(Property, ParserIsTotalOnArbitraryInput) {
  Rng rng(5);
  const std::string alphabet = "program step scene say expect within on timeout hand_at grasp ( ) , : \" \\ \n 0 1.5 s t1 #$%";
  const auto golden = slurp(data_path("goal01.dsl"));
  for (int i = 0; i < 2000; ++i) {
    std::string src;
    if (i % 2 == 0) {
      const auto n = rng.below(200);
      for (std::uint64_t k = 0; k < n; ++k) src.push_back(alphabet[rng.below(alphabet.size())]);
    } else {
      // Truncated or corrupted valid text.
      src = golden.substr(0, rng.below(golden.size()));
      if (!src.empty()) src[rng.below(src.size())] = static_cast<char>(rng.below(256));
    }
    ParseResult r;
    ASSERT_NO_THROW(r = parse_program(src)) << src;
    ASSERT_EQ(r.ok(), r.program.has_value() && r.diagnostics.empty());
    if (!r.program) ASSERT_FALSE(r.diagnostics.empty()) << src;
    for (const auto& d : r.diagnostics) ASSERT_LE(d.span.end, src.size() + 1);
  }
}

}  // namespace
}  // namespace rehab::dsl
