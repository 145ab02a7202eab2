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

#include <set>

#include "rehab/dsl/parser.hpp"
#include "rehab/experiments/batch.hpp"
#include "rehab/experiments/reproduction_suite.hpp"
#include "rehab/genpipe/backend.hpp"
#include "rehab/genpipe/fidelity.hpp"
#include "rehab/genpipe/hallucination.hpp"
#include "rehab/genpipe/mutate.hpp"
#include "rehab/genpipe/prompt.hpp"
#include "rehab/retrofit/template.hpp"
#include "rehab/sim/profile.hpp"
#include "support/fixtures.hpp"

namespace rehab::genpipe {
namespace {

using testing::data_path;
using testing::faithful_program;
using testing::worksheet;

std::vector<std::string> utterances(const dsl::InterventionProgram& p) {
  std::vector<std::string> out;
  for (const auto& s : p.steps) out.push_back(s.utterance);
  return out;
}

std::vector<std::string> texts(const Prescription& rx) {
  std::vector<std::string> out;
  for (const auto& s : rx.steps) out.push_back(s.text);
  return out;
}

TEST(Worksheets, TenGoalsWith106Steps) {
  const auto ws = testing::worksheets();
  ASSERT_EQ(ws.size(), 10u);
  std::size_t steps = 0;
  for (const auto& rx : ws) steps += rx.steps.size();
  EXPECT_EQ(steps, 106u);
}

TEST(Worksheets, EqualTemplateAtDefaultParameters) {
  for (int g = 1; g <= 10; ++g) {
    char name[32];
    std::snprintf(name, sizeof name, "templates/goal%02d.json", g);
    const auto t = retrofit::load_template(data_path(name));
    const auto inst = retrofit::instantiate(t, retrofit::default_params(t), worksheet(g).id);
    EXPECT_EQ(texts(inst), texts(worksheet(g))) << name;
  }
}

TEST(Prompt, SectionsAppearInOrder) {
  const auto cfg = load_prompt_config(data_path("prompt"));
  const auto b = assemble_prompt(worksheet(4), cfg);
  const auto text = b.render();
  const auto doc = text.find("# Language documentation");
  const auto api = text.find("# API library");
  const auto guide = text.find("# Coding guideline");
  const auto ex = text.find("# Example programs");
  const auto rx = text.find("# Prescription\n");
  ASSERT_NE(rx, std::string::npos);
  EXPECT_LT(doc, api);
  EXPECT_LT(api, guide);
  EXPECT_LT(guide, ex);
  EXPECT_LT(ex, rx);
  EXPECT_NE(text.find(worksheet(4).steps[0].text, rx), std::string::npos);
}

TEST(Prompt, EmptyGuidelineIsAConfigurationError) {
  auto cfg = load_prompt_config(data_path("prompt"));
  cfg.coding_guideline.clear();
  EXPECT_THROW(assemble_prompt(worksheet(1), cfg), PromptConfigError);
}

TEST(Prompt, AssemblyIsDeterministic) {
  const auto cfg = load_prompt_config(data_path("prompt"));
  EXPECT_EQ(assemble_prompt(worksheet(2), cfg).render(), assemble_prompt(worksheet(2), cfg).render());
  EXPECT_EQ(assemble_prompt(worksheet(2), cfg).digest(), assemble_prompt(worksheet(2), cfg).digest());
}

TEST(Backend, DeterministicGoalOneUtterancesAreVerbatim) {
  DeterministicBackend backend;
  const auto gen = generate_program(worksheet(1), backend, load_prompt_config(data_path("prompt")));
  const auto r = dsl::parse_program(gen.text);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(utterances(*r.program), texts(worksheet(1)));
  EXPECT_EQ(r.program->steps.size(), 11u);
  EXPECT_EQ(gen.provenance.backend, "deterministic");
}

TEST(Backend, ReplayServesRecordedTranscripts) {
  ReplayBackend backend(data_path("replays"));
  const auto cfg = load_prompt_config(data_path("prompt"));
  for (const auto& rx : testing::worksheets()) {
    const auto gen = generate_program(rx, backend, cfg);
    const auto r = dsl::parse_program(gen.text);
    ASSERT_TRUE(r.ok()) << rx.id;
    EXPECT_TRUE(validate_fidelity(rx, *r.program).correct);
  }
}

TEST(Backend, ReplayWithMissingKey) {
  const auto dir = testing::scratch_dir("replay-empty");
  ReplayBackend backend(dir.string());
  EXPECT_THROW(generate_program(worksheet(1), backend, load_prompt_config(data_path("prompt"))), TranscriptMissing);
}

TEST(Backend, RemoteUnreachableReportsRetries) {
  RemoteConfig rc;
  rc.url = "http://127.0.0.1:9";
  rc.model = "m";
  rc.max_attempts = 2;
  rc.backoff_ms = 1;
  rc.timeout_s = 2;
  RemoteBackend backend(rc);
  try {
    generate_program(worksheet(1), backend, load_prompt_config(data_path("prompt")));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.attempts(), 2);
    EXPECT_EQ(e.last_status(), 0);
  }
}

TEST(Backend, StripsCodeFence) {
  EXPECT_EQ(strip_code_fence("```dsl\nprogram \"p\"\n```\n"), "program \"p\"\n");
}

TEST(Fidelity, IdentityIsCorrectAndComplete) {
  for (const auto& rx : testing::worksheets()) {
    const auto r = validate_fidelity(rx, faithful_program(rx));
    EXPECT_TRUE(r.correct) << rx.id;
    EXPECT_TRUE(r.complete) << rx.id;
    EXPECT_TRUE(r.mismatches().empty());
  }
}

TEST(Fidelity, RepeatedStepIsOneExtraneous) {
  auto u = texts(worksheet(1));
  u.insert(u.begin() + 7, u[6]);
  const auto r = validate_fidelity(texts(worksheet(1)), u);
  const auto m = r.mismatches();
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].verdict, StepVerdict::kExtraneous);
  EXPECT_FALSE(r.complete);
}

TEST(Fidelity, DroppedStepIsOmittedAtItsIndex) {
  auto u = texts(worksheet(1));
  u.erase(u.begin() + 4);
  const auto r = validate_fidelity(texts(worksheet(1)), u);
  const auto m = r.mismatches();
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].verdict, StepVerdict::kOmitted);
  EXPECT_EQ(m[0].rx_index, 5);
  EXPECT_FALSE(r.complete);
}

TEST(Fidelity, SwappedStepsAreReordered) {
  auto u = texts(worksheet(3));
  std::swap(u[2], u[6]);
  const auto r = validate_fidelity(texts(worksheet(3)), u);
  bool reordered = false;
  for (const auto& m : r.mismatches()) reordered |= m.verdict == StepVerdict::kReordered;
  EXPECT_TRUE(reordered);
}

TEST(Fidelity, SmallEditIsSubstituted) {
  auto u = texts(worksheet(2));
  u[3] += " Slowly";
  const auto r = validate_fidelity(texts(worksheet(2)), u);
  const auto m = r.mismatches();
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].verdict, StepVerdict::kSubstituted);
  EXPECT_FALSE(r.correct);
}

TEST(Fidelity, CaseAndWhitespaceAreNormalized) {
  auto u = texts(worksheet(1));
  u[0] = "  SIT at a table   with pink, blue, and yellow post-its. ";
  EXPECT_TRUE(validate_fidelity(texts(worksheet(1)), u).correct);
}

TEST(Hallucination, UnmentionedJointIsFlagged) {
  auto p = faithful_program(worksheet(1));
  p.scene.push_back({dsl::SceneKind::kJoint, "right_elbow_flexion", std::nullopt, {}});
  p.steps[5].expect->predicate = dsl::JointAngle{"right_elbow_flexion", 10, 40};
  const auto f = detect_hallucinated_monitors(worksheet(1), p);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].symbol, "right_elbow_flexion");
  EXPECT_EQ(f[0].step_index, 6);
  EXPECT_EQ(f[0].reason, HallucinationReason::kUnprescribedJoint);
}

TEST(Hallucination, PrescribedTargetIsClean) {
  auto p = faithful_program(worksheet(1));
  p.steps[5].expect->predicate = dsl::HandAt{"pink_postit", 5};
  EXPECT_TRUE(detect_hallucinated_monitors(worksheet(1), p).empty());
}

TEST(Hallucination, UnprescribedThresholdIsFlagged) {
  auto p = faithful_program(worksheet(1));
  p.steps[5].expect->predicate = dsl::HandAt{"pink_postit", 17};
  const auto f = detect_hallucinated_monitors(worksheet(1), p);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].reason, HallucinationReason::kUnprescribedThreshold);
}

TEST(Hallucination, TwentyCleanAndTwentySeeded) {
  const auto profile = sim::standardized_patient();
  std::set<std::pair<std::string, int>> seeded, found;
  int clean_findings = 0;
  for (int round = 0; round < 2; ++round) {
    for (const auto& rx : testing::worksheets()) {
      const auto clean = faithful_program(rx);
      clean_findings += static_cast<int>(detect_hallucinated_monitors(rx, clean).size());
      auto p = clean;
      std::vector<int> monitored;
      for (const auto& s : p.steps) {
        if (s.monitored()) monitored.push_back(s.index);
      }
      const int step = monitored[static_cast<std::size_t>(round * 3) % monitored.size()];
      const auto key = rx.id + "#" + std::to_string(round);
      experiments::inject_hallucinated_atom(p, rx, step, profile);
      seeded.emplace(key, step);
      for (const auto& f : detect_hallucinated_monitors(rx, p)) found.emplace(key, f.step_index);
    }
  }
  EXPECT_EQ(clean_findings, 0);
  EXPECT_EQ(seeded.size(), 20u);
  EXPECT_EQ(found, seeded);
}

TEST(Mutation, DuplicateOnGoalOne) {
  const auto p = faithful_program(worksheet(1));
  const auto m = mutate_program(p, MutationKind::kDuplicate, 7);
  EXPECT_EQ(m.program.steps.size(), p.steps.size() + 1);
  EXPECT_GE(m.label.step, 1);
  EXPECT_LE(m.label.step, 11);
  EXPECT_EQ(m.label.text, p.steps[static_cast<std::size_t>(m.label.step - 1)].utterance);
  EXPECT_TRUE(experiments::verify_mutation(worksheet(1), m).detected);
}

TEST(Mutation, OmitOnSingleStepProgram) {
  dsl::InterventionProgram p;
  p.name = "p";
  p.steps.push_back({1, "Rest.", std::nullopt, std::nullopt, {}});
  EXPECT_THROW(mutate_program(p, MutationKind::kOmit, 1), MutationImpossible);
}

TEST(Mutation, SameSeedSameMutation) {
  const auto p = faithful_program(worksheet(5));
  for (auto kind : {MutationKind::kOmit, MutationKind::kDuplicate, MutationKind::kSubstitute, MutationKind::kReorder}) {
    const auto a = mutate_program(p, kind, 99);
    const auto b = mutate_program(p, kind, 99);
    EXPECT_EQ(a.program, b.program);
    EXPECT_EQ(a.label.key(), b.label.key());
  }
}

TEST(Mutation, HundredSeededMutationsAreDistinctAndDetected) {
  const auto suite = experiments::run_fidelity_suite(testing::worksheets(), 100, 1000);
  ASSERT_EQ(suite.mutations.size(), 100u);
  std::set<std::string> keys;
  std::set<MutationKind> kinds;
  for (const auto& m : suite.mutations) {
    keys.insert(m.label.key());
    kinds.insert(m.label.kind);
    EXPECT_TRUE(m.detected) << m.label.key();
    EXPECT_EQ(m.extra_flags, 0) << m.label.key();
  }
  EXPECT_EQ(keys.size(), 100u);
  EXPECT_EQ(kinds.size(), 5u);
  EXPECT_EQ(suite.faithful_programs, 10);
  EXPECT_EQ(suite.worksheet_steps, 106);
}

TEST(Prescription, JsonRoundTripKeepsNovelEntities) {
  auto rx = worksheet(5);
  rx.steps[1].entities.objects.insert("rubber_band");
  rx.steps[1].entities.novel.insert("rubber_band");
  const auto back = prescription_from_json(prescription_to_json(rx));
  EXPECT_EQ(prescription_to_json(back), prescription_to_json(rx));
  EXPECT_TRUE(back.steps[1].entities.novel.count("rubber_band"));
}

TEST(Prescription, EmptyStepTextIsRejected) {
  auto rx = worksheet(1);
  rx.steps[2].text = "  ";
  EXPECT_THROW(validate_prescription(rx), PrescriptionError);
}

}  // namespace
}  // namespace rehab::genpipe
